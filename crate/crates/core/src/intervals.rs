//! Finite unions of duration intervals with integer endpoints.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A non-empty interval of non-negative reals with integer endpoints.
/// `upper = None` is +∞ (always open).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    lower: i64,
    lower_closed: bool,
    upper: Option<i64>,
    upper_closed: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IntervalError {
    #[error("empty interval")]
    Empty,
    #[error("negative lower bound {0}")]
    Negative(i64),
    #[error("cannot parse interval set: {0}")]
    Syntax(String),
}

impl Interval {
    pub fn new(
        lower: i64,
        lower_closed: bool,
        upper: Option<i64>,
        upper_closed: bool,
    ) -> Result<Self, IntervalError> {
        if lower < 0 {
            return Err(IntervalError::Negative(lower));
        }
        let upper_closed = upper_closed && upper.is_some();
        if let Some(u) = upper {
            if u < lower || (u == lower && !(lower_closed && upper_closed)) {
                return Err(IntervalError::Empty);
            }
        }
        Ok(Interval {
            lower,
            lower_closed,
            upper,
            upper_closed,
        })
    }

    /// `[lo, hi]`
    pub fn closed(lo: i64, hi: i64) -> Self {
        Self::new(lo, true, Some(hi), true).expect("closed interval")
    }

    pub fn point(v: i64) -> Self {
        Self::closed(v, v)
    }

    /// `(lo, +∞)` or `[lo, +∞)`
    pub fn unbounded(lo: i64, lower_closed: bool) -> Self {
        Self::new(lo, lower_closed, None, false).expect("unbounded interval")
    }

    pub fn lower(&self) -> i64 {
        self.lower
    }

    pub fn lower_closed(&self) -> bool {
        self.lower_closed
    }

    pub fn upper(&self) -> Option<i64> {
        self.upper
    }

    pub fn upper_closed(&self) -> bool {
        self.upper_closed
    }

    /// Membership of `t / scale`.
    pub fn contains_scaled(&self, t: i64, scale: i64) -> bool {
        let lo = self.lower * scale;
        let above = t > lo || (self.lower_closed && t == lo);
        let below = match self.upper {
            None => true,
            Some(u) => t < u * scale || (self.upper_closed && t == u * scale),
        };
        above && below
    }

    /// Intersection, `None` when empty.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let (lower, lower_closed) = match self.lower.cmp(&other.lower) {
            Ordering::Greater => (self.lower, self.lower_closed),
            Ordering::Less => (other.lower, other.lower_closed),
            Ordering::Equal => (self.lower, self.lower_closed && other.lower_closed),
        };
        let (upper, upper_closed) = match (self.upper, other.upper) {
            (None, None) => (None, false),
            (Some(_), None) => (self.upper, self.upper_closed),
            (None, Some(_)) => (other.upper, other.upper_closed),
            (Some(a), Some(b)) => match a.cmp(&b) {
                Ordering::Less => (Some(a), self.upper_closed),
                Ordering::Greater => (Some(b), other.upper_closed),
                Ordering::Equal => (Some(a), self.upper_closed && other.upper_closed),
            },
        };
        Interval::new(lower, lower_closed, upper, upper_closed).ok()
    }

    // Sort key: lower endpoint, closed before open.
    fn start_key(&self) -> (i64, bool) {
        (self.lower, !self.lower_closed)
    }

    // Does `next` (starting no earlier than self) overlap or touch self?
    fn merges_with(&self, next: &Interval) -> bool {
        match self.upper {
            None => true,
            Some(u) => next.lower < u || (next.lower == u && (self.upper_closed || next.lower_closed)),
        }
    }

    fn upper_extends(&self, other: &Interval) -> bool {
        match (self.upper, other.upper) {
            (None, _) => false,
            (Some(_), None) => true,
            (Some(a), Some(b)) => b > a || (a == b && other.upper_closed && !self.upper_closed),
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lower_closed { '[' } else { '(' };
        match self.upper {
            None => write!(f, "{open}{},inf)", self.lower),
            Some(u) => {
                let close = if self.upper_closed { ']' } else { ')' };
                write!(f, "{open}{},{u}{close}", self.lower)
            }
        }
    }
}

impl FromStr for Interval {
    type Err = IntervalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || IntervalError::Syntax(s.to_string());
        let s = s.trim();
        let lower_closed = match s.chars().next() {
            Some('[') => true,
            Some('(') => false,
            _ => return Err(bad()),
        };
        let upper_closed = match s.chars().last() {
            Some(']') => true,
            Some(')') => false,
            _ => return Err(bad()),
        };
        let (lo, hi) = s[1..s.len() - 1].split_once(',').ok_or_else(bad)?;
        let lower = lo.trim().parse().map_err(|_| bad())?;
        let upper = match hi.trim() {
            "inf" if !upper_closed => None,
            h => Some(h.parse().map_err(|_| bad())?),
        };
        Interval::new(lower, lower_closed, upper, upper_closed)
    }
}

/// Normalized union of intervals: sorted, pairwise disjoint and non-mergeable.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet::default()
    }

    /// The unique normalized representation of the union of `intervals`.
    pub fn normalize(intervals: impl IntoIterator<Item = Interval>) -> Self {
        let mut items: Vec<Interval> = intervals.into_iter().collect();
        items.sort_by_key(Interval::start_key);
        let mut out: Vec<Interval> = Vec::with_capacity(items.len());
        for iv in items {
            match out.last_mut() {
                Some(last) if last.merges_with(&iv) => {
                    if last.upper_extends(&iv) {
                        last.upper = iv.upper;
                        last.upper_closed = iv.upper_closed;
                    }
                }
                _ => out.push(iv),
            }
        }
        IntervalSet { intervals: out }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        Self::normalize(self.intervals.iter().chain(&other.intervals).copied())
    }

    pub fn insert(&mut self, iv: Interval) {
        *self = Self::normalize(self.intervals.iter().copied().chain([iv]));
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        Self::normalize(
            self.intervals
                .iter()
                .cartesian_product(&other.intervals)
                .filter_map(|(a, b)| a.intersect(b)),
        )
    }

    /// Set equality; exact because both sides are normalized.
    pub fn equals(&self, other: &IntervalSet) -> bool {
        self == other
    }

    pub fn is_subset(&self, other: &IntervalSet) -> bool {
        self.union(other) == *other
    }

    pub fn contains_scaled(&self, t: i64, scale: i64) -> bool {
        self.intervals.iter().any(|iv| iv.contains_scaled(t, scale))
    }

    pub fn contains(&self, t: GridTime) -> bool {
        self.contains_scaled(t.halves(), 2)
    }

    /// Multiples of `granularity` in `[0, horizon]` that lie in the set, sorted.
    pub fn grid_points(&self, granularity: Granularity, horizon: i64) -> Vec<GridTime> {
        let step = granularity.step_halves();
        (0..=horizon * 2)
            .step_by(step as usize)
            .map(GridTime::from_halves)
            .filter(|&t| self.contains(t))
            .collect()
    }
}

impl FromIterator<Interval> for IntervalSet {
    fn from_iter<T: IntoIterator<Item = Interval>>(iter: T) -> Self {
        IntervalSet::normalize(iter)
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return f.write_str("empty");
        }
        write!(f, "{}", self.intervals.iter().join(" u "))
    }
}

impl FromStr for IntervalSet {
    type Err = IntervalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim() == "empty" {
            return Ok(IntervalSet::empty());
        }
        let items = s
            .split(" u ")
            .map(str::parse)
            .collect::<Result<Vec<Interval>, _>>()?;
        let set = IntervalSet::normalize(items.iter().copied());
        if set.intervals != items {
            return Err(IntervalError::Syntax(format!("{s} is not normalized")));
        }
        Ok(set)
    }
}

/// Grid step of the discrete-time oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Granularity {
    One,
    Half,
}

impl Granularity {
    pub fn step_halves(self) -> i64 {
        match self {
            Granularity::One => 2,
            Granularity::Half => 1,
        }
    }

    /// Grid steps per time unit.
    pub fn per_unit(self) -> i64 {
        match self {
            Granularity::One => 1,
            Granularity::Half => 2,
        }
    }
}

impl FromStr for Granularity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "1" | "1.0" => Ok(Granularity::One),
            "0.5" | "1/2" | ".5" => Ok(Granularity::Half),
            _ => Err(format!("unsupported granularity {s} (expected 0.5 or 1)")),
        }
    }
}

/// A time value on the half-unit grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GridTime(i64);

impl GridTime {
    pub fn from_halves(h: i64) -> Self {
        GridTime(h)
    }

    pub fn from_units(u: i64) -> Self {
        GridTime(2 * u)
    }

    pub fn halves(self) -> i64 {
        self.0
    }
}

impl fmt::Display for GridTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}.5", self.0 / 2)
        }
    }
}
