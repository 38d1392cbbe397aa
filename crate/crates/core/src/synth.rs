//! Opacity verdicts and untimed strategy synthesis.
//!
//! A strategy keeps every uncontrollable action and some controllable ones.
//! Candidates are enumerated by cardinality and then lexicographically over
//! the sorted controllable actions, so results and witnesses do not depend
//! on the number of worker threads.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::intervals::IntervalSet;
use crate::model::{control, strategy_universe, ModelError, Order, Strategy, TimedAutomaton};
use crate::reach::{duration_sets, DurationSets, ExplorationLimits, ReachError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub opaque: bool,
    pub effective: bool,
    pub dpriv: IntervalSet,
    pub dpub: IntervalSet,
    /// False when the exploration hit its budget; the other fields are then
    /// lower approximations.
    pub conclusive: bool,
    pub states_explored: usize,
}

impl Verdict {
    fn from_sets(d: DurationSets) -> Verdict {
        Verdict {
            opaque: d.dpriv.equals(&d.dpub),
            effective: !(d.dpriv.is_empty() && d.dpub.is_empty()),
            dpriv: d.dpriv,
            dpub: d.dpub,
            conclusive: !d.budget_exhausted,
            states_explored: d.states_explored,
        }
    }

    /// Verdict of a strategy known to block the final location.
    fn blocked() -> Verdict {
        Verdict {
            opaque: true,
            effective: false,
            dpriv: IntervalSet::empty(),
            dpub: IntervalSet::empty(),
            conclusive: true,
            states_explored: 0,
        }
    }

    fn qualifies(&self, effective_only: bool) -> bool {
        self.opaque && (self.effective || !effective_only)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    All,
    Min,
    Max,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOptions {
    /// Discard strategies under which the final location is unreachable.
    pub effective_only: bool,
    /// Skip strategies whose kept actions are a subset of a strategy already
    /// found to block the final location.
    pub prune: bool,
    pub limits: ExplorationLimits,
    /// Worker threads; 1 runs everything on the calling thread.
    pub jobs: usize,
    pub timeout: Option<Duration>,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            effective_only: false,
            prune: false,
            limits: ExplorationLimits::default(),
            jobs: 1,
            timeout: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SynthesisStats {
    /// Candidates examined, pruned ones included.
    pub candidates_examined: usize,
    pub pruned: usize,
    /// Symbolic states stored over all explorations.
    pub states_explored: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisResult {
    pub strategies: Vec<(Strategy, Verdict)>,
    pub mode: Mode,
    pub witness_only: bool,
    pub effective_only: bool,
    pub stats: SynthesisStats,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error(transparent)]
    Reach(#[from] ReachError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("inconclusive under budget for strategy {0}")]
    Inconclusive(String),
    #[error("timeout after {0:.1} s")]
    Timeout(f64),
    #[error("witness requires min or max")]
    WitnessNeedsExtremal,
    #[error("at most 64 controllable actions are supported, got {0}")]
    TooManyActions(usize),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

/// Decides full timed opacity of `ta` with a single exploration.
pub fn check_full_opacity(ta: &TimedAutomaton, limits: &ExplorationLimits) -> Result<Verdict, ReachError> {
    duration_sets(ta, limits).map(Verdict::from_sets)
}

/// All opaque strategies, sorted in canonical ascending order.
pub fn synth_ctrl(ta: &TimedAutomaton, options: &SynthOptions) -> Result<SynthesisResult, SynthError> {
    synthesize(ta, Mode::All, false, options)
}

/// Opaque strategies of minimum or maximum cardinality, or only the first
/// one in enumeration order when `witness` is set.
pub fn synth_extremal(
    ta: &TimedAutomaton,
    mode: Mode,
    witness: bool,
    options: &SynthOptions,
) -> Result<SynthesisResult, SynthError> {
    synthesize(ta, mode, witness, options)
}

pub fn synthesize(
    ta: &TimedAutomaton,
    mode: Mode,
    witness: bool,
    options: &SynthOptions,
) -> Result<SynthesisResult, SynthError> {
    if witness && mode == Mode::All {
        return Err(SynthError::WitnessNeedsExtremal);
    }
    if ta.controllable.len() > 64 {
        return Err(SynthError::TooManyActions(ta.controllable.len()));
    }
    let started = Instant::now();
    let pool = match options.jobs {
        0 | 1 => None,
        k => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| SynthError::ThreadPool(e.to_string()))?,
        ),
    };
    // Pruning only fires when supersets are examined first.
    let order = match mode {
        Mode::Min => Order::Ascending,
        Mode::Max => Order::Descending,
        Mode::All if options.prune => Order::Descending,
        Mode::All => Order::Ascending,
    };
    let universe = strategy_universe(ta, order);
    let names: Vec<String> = universe.controllable().iter().map(|s| s.to_string()).collect();
    let strategy_of = |idx: &[usize]| Strategy::from_controllable(ta, idx.iter().map(|&i| names[i].as_str()));

    let chunk_len = options.jobs.max(1) * 8;
    let mut blocked: Vec<u64> = Vec::new();
    let mut found: Vec<(Vec<usize>, Strategy, Verdict)> = Vec::new();
    let mut stats = SynthesisStats::default();

    'levels: for (_, combos) in universe.levels() {
        let mut level_blocked = Vec::new();
        let mut combos = combos.peekable();
        while combos.peek().is_some() {
            let chunk: Vec<Vec<usize>> = combos.by_ref().take(chunk_len).collect();
            let remaining = match options.timeout {
                Some(t) => {
                    let left = t.saturating_sub(started.elapsed());
                    if left.is_zero() {
                        return Err(SynthError::Timeout(started.elapsed().as_secs_f64()));
                    }
                    Some(left)
                }
                None => None,
            };
            let limits = ExplorationLimits {
                max_seconds: match (options.limits.max_seconds, remaining) {
                    (Some(a), Some(b)) => Some(a.min(b.as_secs_f64())),
                    (a, b) => a.or(b.map(|d| d.as_secs_f64())),
                },
                ..options.limits
            };
            let examine = |idx: &Vec<usize>| -> Result<Option<Verdict>, SynthError> {
                let mask = mask_of(idx);
                if options.prune && blocked.iter().any(|&b| mask & !b == 0) {
                    return Ok(None);
                }
                let controlled = control(ta, &strategy_of(idx))?;
                Ok(Some(check_full_opacity(&controlled, &limits)?))
            };
            let outcomes: Vec<Result<Option<Verdict>, SynthError>> = match &pool {
                Some(pool) => pool.install(|| chunk.par_iter().map(examine).collect()),
                None => chunk.iter().map(examine).collect(),
            };

            for (idx, outcome) in chunk.into_iter().zip(outcomes) {
                stats.candidates_examined += 1;
                let verdict = match outcome? {
                    Some(v) => {
                        stats.states_explored += v.states_explored;
                        if !v.conclusive {
                            if options.timeout.is_some_and(|t| started.elapsed() >= t) {
                                return Err(SynthError::Timeout(started.elapsed().as_secs_f64()));
                            }
                            return Err(SynthError::Inconclusive(strategy_of(&idx).to_string()));
                        }
                        if !v.effective {
                            level_blocked.push(mask_of(&idx));
                        }
                        v
                    }
                    None => {
                        stats.pruned += 1;
                        Verdict::blocked()
                    }
                };
                if verdict.qualifies(options.effective_only) {
                    found.push((idx.clone(), strategy_of(&idx), verdict));
                    if witness {
                        break 'levels;
                    }
                }
            }
        }
        blocked.extend(level_blocked);
        if mode != Mode::All && !found.is_empty() {
            break;
        }
    }

    found.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
    stats.seconds = started.elapsed().as_secs_f64();
    Ok(SynthesisResult {
        strategies: found.into_iter().map(|(_, s, v)| (s, v)).collect(),
        mode,
        witness_only: witness,
        effective_only: options.effective_only,
        stats,
    })
}

fn mask_of(indices: &[usize]) -> u64 {
    indices.iter().fold(0, |m, &i| m | 1 << i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use std::collections::BTreeSet;

    fn keeps(r: &SynthesisResult) -> Vec<BTreeSet<String>> {
        r.strategies.iter().map(|(s, _)| s.keep().clone()).collect()
    }

    fn set(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn effective() -> SynthOptions {
        SynthOptions { effective_only: true, ..Default::default() }
    }

    #[test]
    fn verdicts_of_running_example() {
        let ta = bundled::running();
        let v = check_full_opacity(&ta, &ExplorationLimits::default()).unwrap();
        assert!(!v.opaque && v.effective && v.conclusive);
        let v = check_full_opacity(&bundled::running_uaf(), &ExplorationLimits::default()).unwrap();
        assert!(v.opaque && v.effective);
        let s = Strategy::new(&ta, ["u", "f"]).unwrap();
        let v = check_full_opacity(&control(&ta, &s).unwrap(), &ExplorationLimits::default()).unwrap();
        assert!(v.opaque && !v.effective);
    }

    #[test]
    fn running_example_synthesis() {
        let ta = bundled::running();
        let all = synth_ctrl(&ta, &effective()).unwrap();
        assert_eq!(keeps(&all), vec![set(&["u", "a"]), set(&["u", "a", "e"]), set(&["u", "a", "f"])]);
        assert_eq!(all.stats.candidates_examined, 64);
        let min = synth_extremal(&ta, Mode::Min, false, &effective()).unwrap();
        assert_eq!(keeps(&min), vec![set(&["u", "a"])]);
        let max = synth_extremal(&ta, Mode::Max, false, &effective()).unwrap();
        assert_eq!(keeps(&max), vec![set(&["u", "a", "e"]), set(&["u", "a", "f"])]);
        let w = synth_extremal(&ta, Mode::Max, true, &effective()).unwrap();
        assert_eq!(keeps(&w), vec![set(&["u", "a", "e"])]);
    }

    #[test]
    fn without_effectiveness_filter_blocking_strategies_count() {
        let ta = bundled::running();
        let min = synth_extremal(&ta, Mode::Min, false, &SynthOptions::default()).unwrap();
        assert_eq!(keeps(&min), vec![set(&["u"])]);
        assert!(!min.strategies[0].1.effective);
    }

    #[test]
    fn pruning_and_jobs_do_not_change_results() {
        for ta in [bundled::running(), bundled::atm()] {
            let base = synth_ctrl(&ta, &effective()).unwrap();
            for (prune, jobs) in [(true, 1), (false, 3), (true, 4)] {
                let opts = SynthOptions { prune, jobs, ..effective() };
                let other = synth_ctrl(&ta, &opts).unwrap();
                assert_eq!(keeps(&base), keeps(&other));
            }
            let pruned = synth_ctrl(&ta, &SynthOptions { prune: true, ..Default::default() }).unwrap();
            let plain = synth_ctrl(&ta, &SynthOptions::default()).unwrap();
            assert_eq!(keeps(&pruned), keeps(&plain));
            assert!(pruned.stats.pruned > 0);
        }
    }

    #[test]
    fn witness_stats_do_not_depend_on_jobs() {
        let ta = bundled::atm();
        let one = synth_extremal(&ta, Mode::Min, true, &effective()).unwrap();
        let four = synth_extremal(&ta, Mode::Min, true, &SynthOptions { jobs: 4, ..effective() }).unwrap();
        assert_eq!(keeps(&one), keeps(&four));
        assert_eq!(one.stats.candidates_examined, four.stats.candidates_examined);
        assert_eq!(one.stats.states_explored, four.stats.states_explored);
    }

    #[test]
    fn witness_requires_extremal_mode() {
        let err = synthesize(&bundled::running(), Mode::All, true, &SynthOptions::default()).unwrap_err();
        assert_eq!(err.to_string(), "witness requires min or max");
    }

    #[test]
    fn inconclusive_aborts() {
        let opts = SynthOptions { limits: ExplorationLimits::with_max_states(3), ..Default::default() };
        let err = synth_ctrl(&bundled::atm(), &opts).unwrap_err();
        assert!(matches!(err, SynthError::Inconclusive(_)), "{err}");
    }

    #[test]
    fn no_controllable_actions_gives_single_candidate() {
        let ta = bundled::running_uaf();
        let mut ta = control(&ta, &Strategy::new(&ta, ["u", "a", "f"]).unwrap()).unwrap();
        ta.uncontrollable.extend(["a".to_string(), "f".to_string()]);
        ta.controllable.clear();
        let r = synth_ctrl(&ta, &SynthOptions::default()).unwrap();
        assert_eq!(keeps(&r), vec![set(&["u", "a", "f"])]);
        assert_eq!(r.stats.candidates_examined, 1);
    }
}
