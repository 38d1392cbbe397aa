//! Decides full timed opacity of the bundled models.
//!
//! ```bash
//! cargo run --example check_opacity
//! ```

use timed_opacity::synth::check_full_opacity;
use timed_opacity::{bundled, parse_model, ExplorationLimits};

fn main() {
    let limits = ExplorationLimits::default();
    for (file, text) in bundled::ALL {
        let ta = parse_model(text).expect("bundled model parses");
        let v = check_full_opacity(&ta, &limits).expect("exploration succeeds");
        let label = match (v.opaque, v.effective) {
            (true, true) => "opaque",
            (true, false) => "opaque, final location unreachable",
            (false, _) => "not opaque",
        };
        println!("{file:<16} {label}");
        println!("    dpriv {}", v.dpriv);
        println!("    dpub  {}", v.dpub);
    }
}
