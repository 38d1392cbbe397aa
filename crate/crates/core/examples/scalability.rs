//! Synthesis time on the ATM as unused controllable actions are added.
//!
//! ```bash
//! cargo run --release --example scalability -- 6
//! ```

use timed_opacity::cli::bench::{run_bench, BenchMode, CSV_HEADER};
use timed_opacity::SynthOptions;

fn main() {
    let max: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let options = SynthOptions { effective_only: true, ..Default::default() };
    let modes = [BenchMode::All, BenchMode::Min, BenchMode::WitnessMin, BenchMode::Max];
    println!("{CSV_HEADER}");
    run_bench((0, max), &modes, &options, |row| println!("{}", row.csv())).expect("benchmark runs");
}
