//! Strategy synthesis on the running example and the ATM, in every mode.
//!
//! ```bash
//! cargo run --release --example synthesize
//! ```

use itertools::Itertools;
use timed_opacity::cli::report::algorithm_name;
use timed_opacity::{bundled, synth_extremal, Mode, SynthOptions, TimedAutomaton};

fn show(ta: &TimedAutomaton, mode: Mode, witness: bool, options: &SynthOptions) {
    let r = synth_extremal(ta, mode, witness, options).expect("synthesis is conclusive");
    println!("{} / {}: {} candidates", ta.name, algorithm_name(mode, witness), r.stats.candidates_examined);
    for (s, _) in &r.strategies {
        println!("    disable {{{}}}", s.disabled(ta).iter().join(", "));
    }
}

fn main() {
    let options = SynthOptions { effective_only: true, prune: true, ..Default::default() };
    for ta in [bundled::running(), bundled::atm()] {
        show(&ta, Mode::All, false, &options);
        show(&ta, Mode::Min, false, &options);
        show(&ta, Mode::Max, false, &options);
        show(&ta, Mode::Min, true, &options);
        show(&ta, Mode::Max, true, &options);
    }
}
