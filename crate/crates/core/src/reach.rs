//! Zone-based computation of the private and public duration sets.
//!
//! Symbolic states carry the location, whether the secret already happened,
//! the discrete valuation and a zone over the model clocks plus an observer
//! clock that is never reset. A run ends at its first arrival in the final
//! location; the observer value at that instant is its duration.

use std::collections::{HashMap, VecDeque};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::intervals::{Interval, IntervalSet};
use crate::model::{is_secret_step, validate, CmpOp, Expr, Secret, TimedAutomaton, Update};
use crate::zones::{Bound, Var, Zone};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExplorationLimits {
    /// Maximal number of stored symbolic states.
    pub max_states: usize,
    /// Wall-clock budget in seconds.
    pub max_seconds: Option<f64>,
}

impl Default for ExplorationLimits {
    fn default() -> Self {
        ExplorationLimits {
            max_states: 100_000,
            max_seconds: None,
        }
    }
}

impl ExplorationLimits {
    pub fn with_max_states(max_states: usize) -> Self {
        ExplorationLimits {
            max_states,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum SearchOrder {
    #[default]
    BreadthFirst,
    DepthFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    pub order: SearchOrder,
    /// Drop the exact value of a clock once it exceeds every constant it is
    /// compared with (see [`Zone::release_above`]).
    pub release_inactive_clocks: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            order: SearchOrder::BreadthFirst,
            release_inactive_clocks: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DurationSets {
    pub dpriv: IntervalSet,
    pub dpub: IntervalSet,
    pub states_explored: usize,
    /// When false the sets are exact.
    pub budget_exhausted: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReachError {
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("edge {edge}: {var} := {value} leaves the domain {lo}..{hi}")]
    DomainViolation {
        edge: String,
        var: String,
        value: i64,
        lo: i64,
        hi: i64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymbolicState {
    pub location: usize,
    pub secret: bool,
    pub discretes: Vec<i64>,
    pub zone: Zone,
}

enum Assign {
    Const(i64),
    Offset(usize, i64),
}

struct CompiledEdge {
    label: String,
    target: usize,
    clock_guard: Vec<(Var, CmpOp, i64)>,
    discrete_guard: Vec<(usize, CmpOp, i64)>,
    resets: Vec<Var>,
    assigns: Vec<(usize, Assign)>,
    secret: bool,
}

struct Compiled {
    clocks: usize,
    init: usize,
    final_location: usize,
    secret_location: Option<usize>,
    invariants: Vec<Vec<(Var, CmpOp, i64)>>,
    outgoing: Vec<Vec<CompiledEdge>>,
    domains: Vec<(String, i64, i64)>,
    initial_discretes: Vec<i64>,
    max_constants: Vec<i64>,
}

impl Compiled {
    fn new(ta: &TimedAutomaton) -> Result<Self, ReachError> {
        let violations = validate(ta);
        if let Some(v) = violations.first() {
            return Err(ReachError::Invalid(v.message.clone()));
        }
        let loc = |n: &str| ta.locations.iter().position(|l| l.name == n).expect("validated");
        let clock = |n: &str| ta.clocks.iter().position(|c| c == n).map(Var::Clock);
        let discrete = |n: &str| ta.discretes.iter().position(|d| d.name == n);

        let invariants = ta
            .locations
            .iter()
            .map(|l| {
                l.invariant
                    .atoms
                    .iter()
                    .map(|a| (clock(&a.subject).expect("validated"), a.op, a.constant))
                    .collect()
            })
            .collect();

        let mut outgoing: Vec<Vec<CompiledEdge>> = ta.locations.iter().map(|_| Vec::new()).collect();
        for e in &ta.edges {
            let mut clock_guard = Vec::new();
            let mut discrete_guard = Vec::new();
            for a in &e.guard.atoms {
                match clock(&a.subject) {
                    Some(v) => clock_guard.push((v, a.op, a.constant)),
                    None => discrete_guard.push((discrete(&a.subject).expect("validated"), a.op, a.constant)),
                }
            }
            let mut resets = Vec::new();
            let mut assigns = Vec::new();
            for u in &e.updates {
                match u {
                    Update::ClockReset(c) => resets.push(clock(c).expect("validated")),
                    Update::DiscreteAssign { var, expr } => {
                        let rhs = match expr {
                            Expr::Const(k) => Assign::Const(*k),
                            Expr::Offset { var, delta } => {
                                Assign::Offset(discrete(var).expect("validated"), *delta)
                            }
                        };
                        assigns.push((discrete(var).expect("validated"), rhs));
                    }
                }
            }
            outgoing[loc(&e.source)].push(CompiledEdge {
                label: e.to_string(),
                target: loc(&e.target),
                clock_guard,
                discrete_guard,
                resets,
                assigns,
                secret: is_secret_step(ta, e, &e.target),
            });
        }

        Ok(Compiled {
            clocks: ta.clocks.len(),
            init: loc(&ta.init),
            final_location: loc(&ta.final_location),
            secret_location: match &ta.secret {
                Secret::Location(l) => Some(loc(l)),
                Secret::Action(_) => None,
            },
            invariants,
            outgoing,
            domains: ta.discretes.iter().map(|d| (d.name.clone(), d.lo, d.hi)).collect(),
            initial_discretes: ta.discretes.iter().map(|d| d.initial).collect(),
            max_constants: ta.clocks.iter().map(|c| ta.max_constant(c)).collect(),
        })
    }

    fn apply_invariant(&self, zone: &mut Zone, location: usize) {
        for &(v, op, c) in &self.invariants[location] {
            zone.constrain(v, op, c);
            if zone.is_empty() {
                return;
            }
        }
    }

    fn release(&self, zone: &mut Zone) {
        for (c, &m) in self.max_constants.iter().enumerate() {
            if zone.lower_bound(Var::Clock(c)) <= Bound::lt(-m) {
                zone.release_above(c, m);
            }
        }
    }

    /// Invariant, then time elapse, then invariant again.
    fn settle(&self, mut zone: Zone, location: usize, release: bool) -> Option<Zone> {
        self.apply_invariant(&mut zone, location);
        if zone.is_empty() {
            return None;
        }
        zone.elapse().ok()?;
        self.apply_invariant(&mut zone, location);
        if release {
            self.release(&mut zone);
        }
        Some(zone)
    }
}

/// Computes DPriv and DPub with the default (breadth-first) search.
pub fn duration_sets(ta: &TimedAutomaton, limits: &ExplorationLimits) -> Result<DurationSets, ReachError> {
    duration_sets_with(ta, limits, &SearchConfig::default())
}

pub fn duration_sets_with(
    ta: &TimedAutomaton,
    limits: &ExplorationLimits,
    config: &SearchConfig,
) -> Result<DurationSets, ReachError> {
    let model = Compiled::new(ta)?;
    let started = Instant::now();
    let mut private: Vec<Interval> = Vec::new();
    let mut public: Vec<Interval> = Vec::new();
    let mut collect = |secret: bool, zone: &Zone| {
        let iv = zone.project_observer().expect("non-empty zone");
        if secret {
            private.push(iv);
        } else {
            public.push(iv);
        }
    };

    let init_secret = model.secret_location == Some(model.init);
    let mut passed: HashMap<(usize, bool, Vec<i64>), Vec<Zone>> = HashMap::new();
    let mut waiting: VecDeque<SymbolicState> = VecDeque::new();
    let mut stored = 0usize;
    let mut exhausted = false;

    let mut start = Zone::init(model.clocks);
    model.apply_invariant(&mut start, model.init);
    if !start.is_empty() {
        if model.init == model.final_location {
            collect(init_secret, &start);
        } else if let Some(zone) = model.settle(start, model.init, config.release_inactive_clocks) {
            stored += 1;
            passed.insert((model.init, init_secret, model.initial_discretes.clone()), vec![zone.clone()]);
            waiting.push_back(SymbolicState {
                location: model.init,
                secret: init_secret,
                discretes: model.initial_discretes.clone(),
                zone,
            });
        }
    }

    let mut steps = 0u64;
    loop {
        let state = match config.order {
            SearchOrder::BreadthFirst => waiting.pop_front(),
            SearchOrder::DepthFirst => waiting.pop_back(),
        };
        let Some(state) = state else { break };
        steps += 1;
        if steps.is_multiple_of(256) {
            if let Some(limit) = limits.max_seconds {
                if started.elapsed().as_secs_f64() > limit {
                    exhausted = true;
                    break;
                }
            }
        }

        for edge in &model.outgoing[state.location] {
            if !edge
                .discrete_guard
                .iter()
                .all(|&(d, op, c)| op.holds(state.discretes[d], c))
            {
                continue;
            }
            let mut zone = state.zone.clone();
            for &(v, op, c) in &edge.clock_guard {
                zone.constrain(v, op, c);
            }
            if zone.is_empty() {
                continue;
            }
            let mut discretes = state.discretes.clone();
            for (d, rhs) in &edge.assigns {
                let value = match *rhs {
                    Assign::Const(k) => k,
                    Assign::Offset(src, delta) => discretes[src] + delta,
                };
                let (name, lo, hi) = &model.domains[*d];
                if value < *lo || value > *hi {
                    return Err(ReachError::DomainViolation {
                        edge: edge.label.clone(),
                        var: name.clone(),
                        value,
                        lo: *lo,
                        hi: *hi,
                    });
                }
                discretes[*d] = value;
            }
            for &v in &edge.resets {
                zone.reset(v).expect("model clocks are resettable");
            }
            let secret = state.secret || edge.secret;

            if edge.target == model.final_location {
                model.apply_invariant(&mut zone, edge.target);
                if !zone.is_empty() {
                    collect(secret, &zone);
                }
                continue;
            }
            let Some(zone) = model.settle(zone, edge.target, config.release_inactive_clocks) else {
                continue;
            };

            let stored_zones = passed.entry((edge.target, secret, discretes.clone())).or_default();
            if stored_zones.iter().any(|z| z.includes(&zone).unwrap_or(false)) {
                continue;
            }
            stored_zones.retain(|z| !zone.includes(z).unwrap_or(false));
            stored_zones.push(zone.clone());
            stored += 1;
            if stored > limits.max_states {
                exhausted = true;
                break;
            }
            waiting.push_back(SymbolicState {
                location: edge.target,
                secret,
                discretes,
                zone,
            });
        }
        if exhausted {
            break;
        }
    }

    Ok(DurationSets {
        dpriv: IntervalSet::normalize(private),
        dpub: IntervalSet::normalize(public),
        states_explored: stored,
        budget_exhausted: exhausted,
    })
}
