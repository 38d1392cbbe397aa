//! Compares the symbolic duration sets with a brute-force grid search.
//!
//! ```bash
//! cargo run --release --example oracle_cross_check
//! ```

use itertools::Itertools;
use timed_opacity::oracle::{cross_check, OracleConfig};
use timed_opacity::{bundled, ExplorationLimits, Granularity};

fn main() {
    let limits = ExplorationLimits::default();
    let runs = [
        (bundled::running(), Granularity::Half, 8),
        (bundled::running_ubc(), Granularity::One, 10),
        (bundled::atm(), Granularity::One, 120),
    ];
    for (ta, granularity, horizon) in runs {
        let config = OracleConfig { granularity, horizon, ..Default::default() };
        let check = cross_check(&ta, &config, &limits).expect("both engines finish");
        println!(
            "{} (H = {horizon}): {} after {} grid states",
            ta.name,
            if check.agrees { "agreement" } else { "MISMATCH" },
            check.grid.states
        );
        println!("    private grid durations: {}", check.grid.dpriv.iter().take(12).join(" "));
        println!("    public grid durations:  {}", check.grid.dpub.iter().take(12).join(" "));
    }
}
