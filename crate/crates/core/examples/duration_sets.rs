//! Duration sets of the running example under a few strategies.
//!
//! ```bash
//! cargo run --example duration_sets
//! ```

use timed_opacity::reach::{duration_sets_with, SearchConfig, SearchOrder};
use timed_opacity::{bundled, control, duration_sets, ExplorationLimits, Strategy};

fn main() {
    let ta = bundled::running();
    let limits = ExplorationLimits::default();

    for keep in [vec!["u", "a", "b", "c", "d", "e", "f"], vec!["u", "b", "c"], vec!["u", "a", "f"], vec!["u", "f"]] {
        let strategy = Strategy::new(&ta, keep).expect("valid strategy");
        let controlled = control(&ta, &strategy).expect("strategy keeps u");
        let d = duration_sets(&controlled, &limits).expect("exploration succeeds");
        println!("{:<24} dpriv = {:<10} dpub = {}", strategy.to_string(), d.dpriv.to_string(), d.dpub);
    }

    // The search order does not matter; only the number of stored zones may.
    let dfs = SearchConfig { order: SearchOrder::DepthFirst, ..Default::default() };
    let d = duration_sets_with(&ta, &limits, &dfs).expect("exploration succeeds");
    println!("depth-first: {} zones, dpub = {}", d.states_explored, d.dpub);
}
