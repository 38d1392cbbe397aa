//! Full timed opacity of timed automata and untimed control for it.
//!
//! The attacker only observes how long an execution takes to reach the final
//! location. A model is fully timed-opaque when the durations of runs that
//! went through the secret coincide with the durations of runs that avoided
//! it. [`synth`] searches for sets of controllable actions to keep so that the
//! controlled model becomes opaque.
//!
//! ```
//! use timed_opacity::{bundled, reach::{duration_sets, ExplorationLimits}};
//!
//! let sets = duration_sets(&bundled::running(), &ExplorationLimits::default()).unwrap();
//! assert_eq!(sets.dpriv.to_string(), "[1,5]");
//! assert_eq!(sets.dpub.to_string(), "[1,3] u [4,4] u (5,inf)");
//! ```

pub mod bundled;
pub mod cli;
pub mod intervals;
pub mod model;
pub mod oracle;
pub mod parser;
pub mod reach;
pub mod synth;
pub mod zones;

pub use intervals::{Granularity, GridTime, Interval, IntervalSet};
pub use model::{control, validate, Secret, Strategy, TimedAutomaton};
pub use parser::{parse_model, render_model};
pub use reach::{duration_sets, DurationSets, ExplorationLimits};
pub use synth::{check_full_opacity, synth_ctrl, synth_extremal, Mode, SynthOptions, Verdict};
