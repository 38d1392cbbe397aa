//! Timed automata with a partitioned action alphabet and a secret.
//!
//! Edges may carry no action at all; such edges use the reserved internal
//! action, which is uncontrollable and survives every [`control`] restriction.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Comparison operator of a guard atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        Some(match s {
            "<" => CmpOp::Lt,
            "<=" => CmpOp::Le,
            "=" => CmpOp::Eq,
            ">=" => CmpOp::Ge,
            ">" => CmpOp::Gt,
            _ => return None,
        })
    }

    /// Evaluates `lhs op rhs`.
    pub fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Gt => lhs > rhs,
        }
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// `subject op constant`, where the subject is a clock or a discrete variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GuardAtom {
    pub subject: String,
    pub op: CmpOp,
    pub constant: i64,
}

impl GuardAtom {
    pub fn new(subject: impl Into<String>, op: CmpOp, constant: i64) -> Self {
        GuardAtom {
            subject: subject.into(),
            op,
            constant,
        }
    }
}

impl fmt::Display for GuardAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.subject, self.op, self.constant)
    }
}

/// Conjunction of atoms; the empty conjunction is `true`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Guard {
    pub atoms: Vec<GuardAtom>,
}

impl Guard {
    pub fn new(atoms: Vec<GuardAtom>) -> Self {
        Guard { atoms }
    }

    pub fn is_true(&self) -> bool {
        self.atoms.is_empty()
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return f.write_str("true");
        }
        write!(f, "{}", self.atoms.iter().join(" & "))
    }
}

/// Bounded integer variable. Booleans are encoded as the domain `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiscreteVar {
    pub name: String,
    pub lo: i64,
    pub hi: i64,
    pub initial: i64,
}

/// Right-hand side of a discrete assignment.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Expr {
    Const(i64),
    /// `var + delta` (delta may be negative).
    Offset { var: String, delta: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Update {
    ClockReset(String),
    DiscreteAssign { var: String, expr: Expr },
}

impl fmt::Display for Update {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Update::ClockReset(c) => write!(f, "{c} := 0"),
            Update::DiscreteAssign { var, expr } => match expr {
                Expr::Const(k) => write!(f, "{var} := {k}"),
                Expr::Offset { var: src, delta } if *delta < 0 => {
                    write!(f, "{var} := {src} - {}", -delta)
                }
                Expr::Offset { var: src, delta } => write!(f, "{var} := {src} + {delta}"),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub source: String,
    pub guard: Guard,
    /// `None` is the reserved internal action.
    pub action: Option<String>,
    pub updates: Vec<Update>,
    pub target: String,
}

impl Edge {
    pub fn new(source: impl Into<String>, target: impl Into<String>) -> Self {
        Edge {
            source: source.into(),
            guard: Guard::default(),
            action: None,
            updates: Vec::new(),
            target: target.into(),
        }
    }

    pub fn when(mut self, atoms: Vec<GuardAtom>) -> Self {
        self.guard = Guard::new(atoms);
        self
    }

    pub fn sync(mut self, action: impl Into<String>) -> Self {
        self.action = Some(action.into());
        self
    }

    pub fn reset(mut self, clock: impl Into<String>) -> Self {
        self.updates.push(Update::ClockReset(clock.into()));
        self
    }

    pub fn is_internal(&self) -> bool {
        self.action.is_none()
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.source, self.target)?;
        if let Some(a) = &self.action {
            write!(f, " ({a})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Location {
    pub name: String,
    pub invariant: Guard,
}

impl Location {
    pub fn new(name: impl Into<String>) -> Self {
        Location {
            name: name.into(),
            invariant: Guard::default(),
        }
    }

    pub fn with_invariant(name: impl Into<String>, atoms: Vec<GuardAtom>) -> Self {
        Location {
            name: name.into(),
            invariant: Guard::new(atoms),
        }
    }
}

/// What the attacker must not learn: a visit to a location or the firing of an action.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Secret {
    Location(String),
    Action(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimedAutomaton {
    pub name: String,
    pub clocks: Vec<String>,
    pub discretes: Vec<DiscreteVar>,
    pub controllable: BTreeSet<String>,
    pub uncontrollable: BTreeSet<String>,
    pub secret: Secret,
    pub init: String,
    pub final_location: String,
    pub locations: Vec<Location>,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("invalid strategy: uncontrollable action {0} is not kept")]
    MissingUncontrollable(String),
    #[error("invalid strategy: {0} is not an action of the model")]
    UnknownAction(String),
}

/// Which declaration a [`Violation`] is attached to. The derived order follows
/// the order of declarations in a model file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Origin {
    Header,
    Clocks,
    Discrete(usize),
    Actions,
    Secret,
    Init,
    Final,
    Location(usize),
    Edge(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Violation {
    pub origin: Origin,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl TimedAutomaton {
    /// All named actions, Σc ∪ Σu.
    pub fn actions(&self) -> BTreeSet<String> {
        self.controllable
            .union(&self.uncontrollable)
            .cloned()
            .collect()
    }

    pub fn location(&self, name: &str) -> Option<&Location> {
        self.locations.iter().find(|l| l.name == name)
    }

    pub fn is_clock(&self, name: &str) -> bool {
        self.clocks.iter().any(|c| c == name)
    }

    pub fn discrete(&self, name: &str) -> Option<&DiscreteVar> {
        self.discretes.iter().find(|d| d.name == name)
    }

    /// Largest constant any guard or invariant compares `clock` with (0 if none).
    pub fn max_constant(&self, clock: &str) -> i64 {
        self.locations
            .iter()
            .flat_map(|l| l.invariant.atoms.iter())
            .chain(self.edges.iter().flat_map(|e| e.guard.atoms.iter()))
            .filter(|a| a.subject == clock)
            .map(|a| a.constant)
            .fold(0, i64::max)
    }

    /// Largest clock constant of the whole model (0 if none).
    pub fn max_clock_constant(&self) -> i64 {
        self.clocks
            .iter()
            .map(|c| self.max_constant(c))
            .fold(0, i64::max)
    }
}

/// Returns every well-formedness violation of `ta`, ordered by declaration.
pub fn validate(ta: &TimedAutomaton) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |origin, message: String| out.push(Violation { origin, message });

    let mut names = HashSet::new();
    for c in &ta.clocks {
        if !names.insert(c.as_str()) {
            push(Origin::Clocks, format!("duplicate variable {c}"));
        }
    }
    for (i, d) in ta.discretes.iter().enumerate() {
        if !names.insert(d.name.as_str()) {
            push(Origin::Discrete(i), format!("duplicate variable {}", d.name));
        }
        if d.lo > d.hi {
            push(
                Origin::Discrete(i),
                format!("empty domain {}..{} for {}", d.lo, d.hi, d.name),
            );
        } else if d.initial < d.lo || d.initial > d.hi {
            push(
                Origin::Discrete(i),
                format!(
                    "initial value {} of {} outside {}..{}",
                    d.initial, d.name, d.lo, d.hi
                ),
            );
        }
    }

    for a in ta.controllable.intersection(&ta.uncontrollable) {
        push(
            Origin::Actions,
            format!("action {a} is both controllable and uncontrollable"),
        );
    }

    let mut loc_names = HashSet::new();
    let declared = |n: &str| ta.locations.iter().any(|l| l.name == n);
    match &ta.secret {
        Secret::Location(l) => {
            if !declared(l) {
                push(Origin::Secret, format!("unknown location {l}"));
            } else if *l == ta.final_location {
                push(Origin::Secret, "secret equals final".to_string());
            }
        }
        Secret::Action(a) => {
            if !ta.controllable.contains(a) && !ta.uncontrollable.contains(a) {
                push(Origin::Secret, format!("unknown action {a}"));
            }
        }
    }
    if !declared(&ta.init) {
        push(Origin::Init, format!("unknown location {}", ta.init));
    }
    if !declared(&ta.final_location) {
        push(
            Origin::Final,
            format!("unknown location {}", ta.final_location),
        );
    }

    for (i, l) in ta.locations.iter().enumerate() {
        if !loc_names.insert(l.name.as_str()) {
            push(Origin::Location(i), format!("duplicate location {}", l.name));
        }
        for atom in &l.invariant.atoms {
            if ta.is_clock(&atom.subject) {
                continue;
            }
            if ta.discrete(&atom.subject).is_some() {
                push(
                    Origin::Location(i),
                    format!("discrete atom {atom} in invariant of {}", l.name),
                );
            } else {
                push(
                    Origin::Location(i),
                    format!("unknown clock {}", atom.subject),
                );
            }
        }
    }

    for (i, e) in ta.edges.iter().enumerate() {
        let origin = Origin::Edge(i);
        for l in [&e.source, &e.target] {
            if !declared(l) {
                push(origin, format!("unknown location {l}"));
            }
        }
        if let Some(a) = &e.action {
            if !ta.controllable.contains(a) && !ta.uncontrollable.contains(a) {
                push(origin, format!("unknown action {a}"));
            }
        }
        for atom in &e.guard.atoms {
            if !ta.is_clock(&atom.subject) && ta.discrete(&atom.subject).is_none() {
                push(origin, format!("unknown clock {}", atom.subject));
            }
        }
        for u in &e.updates {
            match u {
                Update::ClockReset(c) => {
                    if !ta.is_clock(c) {
                        push(origin, format!("unknown clock {c}"));
                    }
                }
                Update::DiscreteAssign { var, expr } => {
                    let Some(d) = ta.discrete(var) else {
                        push(origin, format!("unknown discrete variable {var}"));
                        continue;
                    };
                    match expr {
                        Expr::Const(k) if *k < d.lo || *k > d.hi => push(
                            origin,
                            format!("value {k} outside {}..{} for {var}", d.lo, d.hi),
                        ),
                        Expr::Offset { var: src, .. } if ta.discrete(src).is_none() => {
                            push(origin, format!("unknown discrete variable {src}"))
                        }
                        _ => {}
                    }
                }
            }
        }
    }

    out.sort_by_key(|v| v.origin);
    out
}

/// A kept-action set σ with Σu ⊆ σ ⊆ Σ.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Strategy {
    keep: BTreeSet<String>,
}

impl Strategy {
    pub fn new<I, S>(ta: &TimedAutomaton, keep: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let keep: BTreeSet<String> = keep.into_iter().map(Into::into).collect();
        if let Some(a) = keep
            .iter()
            .find(|a| !ta.controllable.contains(*a) && !ta.uncontrollable.contains(*a))
        {
            return Err(ModelError::UnknownAction(a.clone()));
        }
        if let Some(u) = ta.uncontrollable.iter().find(|u| !keep.contains(*u)) {
            return Err(ModelError::MissingUncontrollable(u.clone()));
        }
        Ok(Strategy { keep })
    }

    /// Builds Σu ∪ `controllable`, ignoring names outside Σc.
    pub fn from_controllable<'a, I>(ta: &TimedAutomaton, controllable: I) -> Self
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut keep = ta.uncontrollable.clone();
        keep.extend(
            controllable
                .into_iter()
                .filter(|a| ta.controllable.contains(*a))
                .map(str::to_string),
        );
        Strategy { keep }
    }

    /// The most permissive strategy, Σ itself.
    pub fn full(ta: &TimedAutomaton) -> Self {
        Strategy { keep: ta.actions() }
    }

    pub fn keep(&self) -> &BTreeSet<String> {
        &self.keep
    }

    pub fn contains(&self, action: &str) -> bool {
        self.keep.contains(action)
    }

    pub fn len(&self) -> usize {
        self.keep.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keep.is_empty()
    }

    /// Σc \ σ, the controllable actions this strategy disables.
    pub fn disabled(&self, ta: &TimedAutomaton) -> BTreeSet<String> {
        ta.controllable.difference(&self.keep).cloned().collect()
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.keep.iter().join(", "))
    }
}

/// Restricts `ta` to the edges whose action is kept by `strategy` (internal
/// edges always stay).
pub fn control(ta: &TimedAutomaton, strategy: &Strategy) -> Result<TimedAutomaton, ModelError> {
    if let Some(u) = ta
        .uncontrollable
        .iter()
        .find(|u| !strategy.contains(u.as_str()))
    {
        return Err(ModelError::MissingUncontrollable(u.clone()));
    }
    let mut out = ta.clone();
    out.controllable.retain(|a| strategy.contains(a));
    out.edges.retain(|e| match &e.action {
        None => true,
        Some(a) => strategy.contains(a),
    });
    Ok(out)
}

/// Whether firing `edge` into `target` performs the secret.
pub fn is_secret_step(ta: &TimedAutomaton, edge: &Edge, target: &str) -> bool {
    match &ta.secret {
        Secret::Location(l) => l == target,
        Secret::Action(a) => edge.action.as_deref() == Some(a.as_str()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Order {
    Ascending,
    Descending,
}

/// Lazily enumerates every strategy Σu ∪ s for s ⊆ Σc, by cardinality
/// (ascending or descending) and then lexicographically on the sorted names.
pub fn strategy_universe(ta: &TimedAutomaton, order: Order) -> StrategyUniverse<'_> {
    let n = ta.controllable.len();
    let sizes: Vec<usize> = match order {
        Order::Ascending => (0..=n).collect(),
        Order::Descending => (0..=n).rev().collect(),
    };
    StrategyUniverse {
        ta,
        controllable: ta.controllable.iter().map(String::as_str).collect(),
        sizes: sizes.into_iter(),
        current: None,
    }
}

type Combos = itertools::Combinations<std::ops::Range<usize>>;

pub struct StrategyUniverse<'a> {
    ta: &'a TimedAutomaton,
    controllable: Vec<&'a str>,
    sizes: std::vec::IntoIter<usize>,
    current: Option<Combos>,
}

impl<'a> StrategyUniverse<'a> {
    /// Sorted Σc; strategy indices refer to this list.
    pub fn controllable(&self) -> &[&'a str] {
        &self.controllable
    }

    /// Iterates the remaining levels, each as a lazy iterator over index sets
    /// into [`Self::controllable`]; level size = number of kept controllables.
    pub fn levels(self) -> impl Iterator<Item = (usize, Combos)> {
        let n = self.controllable.len();
        self.sizes.map(move |k| (k, (0..n).combinations(k)))
    }

    pub fn strategy_of(&self, indices: &[usize]) -> Strategy {
        Strategy::from_controllable(self.ta, indices.iter().map(|&i| self.controllable[i]))
    }
}

impl Iterator for StrategyUniverse<'_> {
    type Item = Strategy;

    fn next(&mut self) -> Option<Strategy> {
        loop {
            if let Some(combos) = &mut self.current {
                if let Some(idx) = combos.next() {
                    return Some(self.strategy_of(&idx));
                }
            }
            let k = self.sizes.next()?;
            self.current = Some((0..self.controllable.len()).combinations(k));
        }
    }
}
