//! Brute-force duration sets on a time grid.
//!
//! Runs are explored with delays that are multiples of the granularity, over
//! concrete clock values. Each clock is capped one unit above the largest
//! constant it is compared with, which keeps the state space finite without
//! changing the truth of any guard or invariant. This module shares no code
//! with the symbolic engine and serves as its reference.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::intervals::{Granularity, GridTime, IntervalSet};
use crate::model::{is_secret_step, validate, CmpOp, Expr, GuardAtom, Secret, TimedAutomaton, Update};
use crate::reach::{duration_sets, ExplorationLimits, ReachError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub granularity: Granularity,
    /// Largest explored duration, in time units.
    pub horizon: i64,
    /// Maximal number of distinct concrete states.
    pub max_states: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            granularity: Granularity::Half,
            horizon: 10,
            max_states: 50_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConcreteState {
    /// Index into the model's locations.
    pub location: usize,
    pub secret: bool,
    pub discretes: Vec<i64>,
    /// Capped clock values, in the model's clock order.
    pub clocks: Vec<GridTime>,
    pub elapsed: GridTime,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("horizon must be positive")]
    Horizon,
    #[error("guard {0} violated")]
    Guard(String),
    #[error("invariant {atom} of {location} violated")]
    Invariant { atom: String, location: String },
    #[error("edge {edge}: {var} := {value} leaves the domain {lo}..{hi}")]
    Domain {
        edge: String,
        var: String,
        value: i64,
        lo: i64,
        hi: i64,
    },
    #[error("edge {edge} does not leave {location}")]
    WrongSource { edge: String, location: String },
    #[error("delay {0} is not a multiple of the granularity")]
    OffGrid(GridTime),
    #[error("more than {0} concrete states; raise the budget or lower the horizon")]
    Budget(usize),
    #[error(transparent)]
    Symbolic(#[from] ReachError),
}

/// Durations found on the grid, up to the horizon.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridDurations {
    pub dpriv: BTreeSet<GridTime>,
    pub dpub: BTreeSet<GridTime>,
    pub states: usize,
}

/// Concrete semantics of one model at one granularity.
///
/// Internally a state without its elapsed time is packed as
/// `[location, secret, discretes.., clocks in half units..]`.
pub struct Oracle<'a> {
    ta: &'a TimedAutomaton,
    config: OracleConfig,
    /// Per clock, in half units.
    caps: Vec<i32>,
    invariants: Vec<Vec<Atom>>,
    edges: Vec<CompiledEdge>,
    outgoing: Vec<Vec<usize>>,
    init: usize,
    final_location: usize,
}

struct Atom {
    /// Position in the packed state.
    slot: usize,
    op: CmpOp,
    rhs: i32,
    text: String,
}

struct CompiledEdge {
    target: usize,
    secret: bool,
    guard: Vec<Atom>,
    resets: Vec<usize>,
    /// (slot, source slot or none, constant): `slot := source + constant`.
    assigns: Vec<(usize, Option<usize>, i32)>,
}

const LOC: usize = 0;
const SECRET: usize = 1;

impl<'a> Oracle<'a> {
    pub fn new(ta: &'a TimedAutomaton, config: OracleConfig) -> Result<Self, OracleError> {
        if config.horizon <= 0 {
            return Err(OracleError::Horizon);
        }
        if let Some(v) = validate(ta).first() {
            return Err(OracleError::Invalid(v.message.clone()));
        }
        let location = |n: &str| ta.locations.iter().position(|l| l.name == n).expect("validated");
        let discrete = |n: &str| ta.discretes.iter().position(|d| d.name == n).map(|i| 2 + i);
        let clock = |n: &str| ta.clocks.iter().position(|c| c == n).map(|i| 2 + ta.discretes.len() + i);
        let atom = |a: &GuardAtom| match clock(&a.subject) {
            Some(slot) => Atom { slot, op: a.op, rhs: 2 * a.constant as i32, text: a.to_string() },
            None => Atom {
                slot: discrete(&a.subject).expect("validated"),
                op: a.op,
                rhs: a.constant as i32,
                text: a.to_string(),
            },
        };
        let mut outgoing = vec![Vec::new(); ta.locations.len()];
        let edges = ta
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| {
                outgoing[location(&e.source)].push(i);
                let mut resets = Vec::new();
                let mut assigns = Vec::new();
                for u in &e.updates {
                    match u {
                        Update::ClockReset(c) => resets.push(clock(c).expect("validated")),
                        Update::DiscreteAssign { var, expr } => {
                            let slot = discrete(var).expect("validated");
                            assigns.push(match expr {
                                Expr::Const(k) => (slot, None, *k as i32),
                                Expr::Offset { var, delta } => (slot, discrete(var), *delta as i32),
                            });
                        }
                    }
                }
                CompiledEdge {
                    target: location(&e.target),
                    secret: is_secret_step(ta, e, &e.target),
                    guard: e.guard.atoms.iter().map(atom).collect(),
                    resets,
                    assigns,
                }
            })
            .collect();
        Ok(Oracle {
            ta,
            config,
            caps: ta.clocks.iter().map(|c| 2 * (ta.max_constant(c) as i32 + 1)).collect(),
            invariants: ta
                .locations
                .iter()
                .map(|l| l.invariant.atoms.iter().map(atom).collect())
                .collect(),
            edges,
            outgoing,
            init: location(&ta.init),
            final_location: location(&ta.final_location),
        })
    }

    pub fn initial_state(&self) -> ConcreteState {
        ConcreteState {
            location: self.init,
            secret: matches!(&self.ta.secret, Secret::Location(l) if *l == self.ta.init),
            discretes: self.ta.discretes.iter().map(|d| d.initial).collect(),
            clocks: vec![GridTime::from_halves(0); self.ta.clocks.len()],
            elapsed: GridTime::from_halves(0),
        }
    }

    /// Waits `delay` in the current location, then fires `self.ta.edges[edge]`.
    pub fn step(&self, state: &ConcreteState, delay: GridTime, edge: usize) -> Result<ConcreteState, OracleError> {
        if delay.halves() < 0 || delay.halves() % self.config.granularity.step_halves() != 0 {
            return Err(OracleError::OffGrid(delay));
        }
        if !self.outgoing[state.location].contains(&edge) {
            return Err(OracleError::WrongSource {
                edge: self.ta.edges[edge].to_string(),
                location: self.ta.locations[state.location].name.clone(),
            });
        }
        let packed = self.pack(state);
        self.check_invariant(&packed)?;
        let delayed = self.delayed(&packed, delay.halves() as i32);
        self.check_invariant(&delayed)?;
        if let Some(a) = failing(&self.edges[edge].guard, &delayed) {
            return Err(OracleError::Guard(a.text.clone()));
        }
        let next = self.fire_unchecked(&delayed, edge)?;
        self.check_invariant(&next)?;
        Ok(self.unpack(&next, GridTime::from_halves(state.elapsed.halves() + delay.halves())))
    }

    /// Breadth-first search layered by elapsed time; every state of a layer
    /// shares the same elapsed value, so only one layer is kept in memory.
    pub fn grid_duration_sets(&self) -> Result<GridDurations, OracleError> {
        let mut out = GridDurations::default();
        let start = self.pack(&self.initial_state());
        if self.check_invariant(&start).is_err() {
            return Ok(out);
        }
        let step = self.config.granularity.step_halves() as i32;
        let horizon = 2 * self.config.horizon;
        let mut layer = vec![start];
        let mut elapsed = 0;
        loop {
            let now = GridTime::from_halves(elapsed);
            // Close the layer under zero-delay discrete steps.
            let mut seen: HashSet<Vec<i32>> = HashSet::new();
            let mut stack = Vec::new();
            for s in layer.drain(..) {
                if s[LOC] as usize == self.final_location {
                    record(&mut out, &s, now);
                } else if seen.insert(s.clone()) {
                    stack.push(s);
                }
            }
            let mut members = Vec::new();
            while let Some(s) = stack.pop() {
                for &i in &self.outgoing[s[LOC] as usize] {
                    if failing(&self.edges[i].guard, &s).is_some() {
                        continue;
                    }
                    let next = self.fire_unchecked(&s, i)?;
                    if failing(&self.invariants[next[LOC] as usize], &next).is_some() {
                        continue;
                    }
                    if next[LOC] as usize == self.final_location {
                        record(&mut out, &next, now);
                    } else if seen.insert(next.clone()) {
                        stack.push(next);
                    }
                }
                members.push(s);
            }
            out.states += members.len();
            if out.states > self.config.max_states {
                return Err(OracleError::Budget(self.config.max_states));
            }
            if elapsed + step as i64 > horizon {
                break;
            }
            elapsed += step as i64;
            layer = members
                .iter()
                .map(|s| self.delayed(s, step))
                .filter(|s| failing(&self.invariants[s[LOC] as usize], s).is_none())
                .collect();
            if layer.is_empty() {
                break;
            }
        }
        Ok(out)
    }

    /// Applies the updates of `edge`, whose guard already holds.
    fn fire_unchecked(&self, s: &[i32], edge: usize) -> Result<Vec<i32>, OracleError> {
        let e = &self.edges[edge];
        let mut next = s.to_vec();
        for &c in &e.resets {
            next[c] = 0;
        }
        for &(slot, source, k) in &e.assigns {
            let value = source.map_or(0, |src| next[src]) + k;
            let d = &self.ta.discretes[slot - 2];
            if (value as i64) < d.lo || (value as i64) > d.hi {
                return Err(OracleError::Domain {
                    edge: self.ta.edges[edge].to_string(),
                    var: d.name.clone(),
                    value: value as i64,
                    lo: d.lo,
                    hi: d.hi,
                });
            }
            next[slot] = value;
        }
        next[LOC] = e.target as i32;
        next[SECRET] |= e.secret as i32;
        Ok(next)
    }

    fn delayed(&self, s: &[i32], halves: i32) -> Vec<i32> {
        let mut next = s.to_vec();
        let first = 2 + self.ta.discretes.len();
        for (c, cap) in next[first..].iter_mut().zip(&self.caps) {
            *c = (*c + halves).min(*cap);
        }
        next
    }

    fn check_invariant(&self, s: &[i32]) -> Result<(), OracleError> {
        let location = s[LOC] as usize;
        match failing(&self.invariants[location], s) {
            Some(a) => Err(OracleError::Invariant {
                atom: a.text.clone(),
                location: self.ta.locations[location].name.clone(),
            }),
            None => Ok(()),
        }
    }

    fn pack(&self, state: &ConcreteState) -> Vec<i32> {
        let mut s = vec![state.location as i32, state.secret as i32];
        s.extend(state.discretes.iter().map(|&d| d as i32));
        s.extend(state.clocks.iter().zip(&self.caps).map(|(c, &cap)| (c.halves() as i32).min(cap)));
        s
    }

    fn unpack(&self, s: &[i32], elapsed: GridTime) -> ConcreteState {
        let first = 2 + self.ta.discretes.len();
        ConcreteState {
            location: s[LOC] as usize,
            secret: s[SECRET] != 0,
            discretes: s[2..first].iter().map(|&d| d as i64).collect(),
            clocks: s[first..].iter().map(|&c| GridTime::from_halves(c as i64)).collect(),
            elapsed,
        }
    }
}

fn failing<'b>(atoms: &'b [Atom], s: &[i32]) -> Option<&'b Atom> {
    atoms.iter().find(|a| !a.op.holds(s[a.slot] as i64, a.rhs as i64))
}

fn record(out: &mut GridDurations, s: &[i32], now: GridTime) {
    if s[SECRET] != 0 {
        out.dpriv.insert(now);
    } else {
        out.dpub.insert(now);
    }
}

/// Grid durations of `ta` under `config`.
pub fn grid_duration_sets(ta: &TimedAutomaton, config: &OracleConfig) -> Result<GridDurations, OracleError> {
    Oracle::new(ta, *config)?.grid_duration_sets()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Private,
    Public,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub side: Side,
    pub time: GridTime,
    /// Whether the symbolic set contains the point (the grid search then
    /// missed it) or not (the grid search found a duration the symbolic
    /// engine lacks).
    pub in_symbolic: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub agrees: bool,
    pub mismatches: Vec<Mismatch>,
    pub grid: GridDurations,
}

impl CrossCheck {
    /// The mismatching grid points, sorted and without duplicates.
    pub fn points(&self) -> Vec<GridTime> {
        self.mismatches.iter().map(|m| m.time).collect::<BTreeSet<_>>().into_iter().collect()
    }
}

/// Compares symbolic sets with grid durations on every grid point of `[0, H]`.
pub fn compare(dpriv: &IntervalSet, dpub: &IntervalSet, grid: GridDurations, config: &OracleConfig) -> CrossCheck {
    let mut mismatches = Vec::new();
    for (side, symbolic, points) in [(Side::Private, dpriv, &grid.dpriv), (Side::Public, dpub, &grid.dpub)] {
        let expected: BTreeSet<GridTime> = symbolic.grid_points(config.granularity, config.horizon).into_iter().collect();
        mismatches.extend(expected.symmetric_difference(points).map(|&time| Mismatch {
            side,
            time,
            in_symbolic: expected.contains(&time),
        }));
    }
    mismatches.sort_by_key(|m| (m.time, m.side));
    CrossCheck {
        agrees: mismatches.is_empty(),
        mismatches,
        grid,
    }
}

/// Runs both engines on `ta` and compares them on the grid.
pub fn cross_check(ta: &TimedAutomaton, config: &OracleConfig, limits: &ExplorationLimits) -> Result<CrossCheck, OracleError> {
    let grid = grid_duration_sets(ta, config)?;
    let symbolic = duration_sets(ta, limits)?;
    if symbolic.budget_exhausted {
        return Err(OracleError::Symbolic(ReachError::Invalid(format!(
            "symbolic exploration exceeded {} states",
            limits.max_states
        ))));
    }
    Ok(compare(&symbolic.dpriv, &symbolic.dpub, grid, config))
}
