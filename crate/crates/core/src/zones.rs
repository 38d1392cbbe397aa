//! Difference-bound matrices over the model clocks plus one observer clock.
//!
//! Index 0 is the reference clock (constant 0), index 1 the observer (never
//! reset, so its value is the elapsed time), indices `2..` the model clocks.
//! Entry `(i, j)` bounds `v_i - v_j`.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::intervals::Interval;
use crate::model::CmpOp;

/// Upper bound `< value` or `<= value`, or +∞.
///
/// Encoded as `2 * value + (non-strict as i64)` so that the integer order is
/// the tightness order: `(v, <) < (v, <=) < (v + 1, <)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bound(i64);

impl Bound {
    pub const INFINITY: Bound = Bound(i64::MAX);
    pub const LE_ZERO: Bound = Bound(1);
    pub const LT_ZERO: Bound = Bound(0);

    pub fn le(v: i64) -> Bound {
        Bound(v * 2 + 1)
    }

    pub fn lt(v: i64) -> Bound {
        Bound(v * 2)
    }

    pub fn new(v: i64, strict: bool) -> Bound {
        if strict {
            Bound::lt(v)
        } else {
            Bound::le(v)
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Bound::INFINITY
    }

    pub fn value(self) -> Option<i64> {
        (!self.is_infinite()).then_some(self.0 >> 1)
    }

    pub fn is_strict(self) -> bool {
        self.is_infinite() || self.0 & 1 == 0
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: Bound) -> Bound {
        if self.is_infinite() || other.is_infinite() {
            return Bound::INFINITY;
        }
        Bound((((self.0 >> 1) + (other.0 >> 1)) << 1) | (self.0 & other.0 & 1))
    }

    /// Does `d ⋈ self` hold for the real `t / scale`?
    pub fn admits_scaled(self, t: i64, scale: i64) -> bool {
        match self.value() {
            None => true,
            Some(v) if self.is_strict() => t < v * scale,
            Some(v) => t <= v * scale,
        }
    }
}

impl fmt::Debug for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            None => f.write_str("<inf"),
            Some(v) if self.is_strict() => write!(f, "<{v}"),
            Some(v) => write!(f, "<={v}"),
        }
    }
}

/// A DBM variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    Zero,
    Observer,
    /// Model clock by declaration index.
    Clock(usize),
}

impl Var {
    pub fn index(self) -> usize {
        match self {
            Var::Zero => 0,
            Var::Observer => 1,
            Var::Clock(c) => c + 2,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ZoneError {
    #[error("the observer clock is never reset")]
    ObserverReset,
    #[error("operation on an empty zone")]
    EmptyZone,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Zone {
    dim: usize,
    m: Vec<Bound>,
}

impl Zone {
    /// The point zone where the observer and all `clocks` equal 0.
    pub fn init(clocks: usize) -> Zone {
        let dim = clocks + 2;
        Zone {
            dim,
            m: vec![Bound::LE_ZERO; dim * dim],
        }
    }

    /// The unconstrained zone (all clocks ≥ 0).
    pub fn universe(clocks: usize) -> Zone {
        let dim = clocks + 2;
        let mut m = vec![Bound::INFINITY; dim * dim];
        for i in 0..dim {
            m[i * dim + i] = Bound::LE_ZERO;
            m[i] = Bound::LE_ZERO;
        }
        Zone { dim, m }
    }

    /// Builds a zone from raw entries (row-major); the result is canonicalized.
    pub fn from_matrix(dim: usize, entries: Vec<Bound>) -> Zone {
        assert_eq!(entries.len(), dim * dim, "matrix must be {dim}x{dim}");
        assert!(dim >= 2, "a zone has at least the reference and observer");
        let mut z = Zone { dim, m: entries };
        z.canonicalize();
        z
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn clocks(&self) -> usize {
        self.dim - 2
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Bound {
        self.m[i * self.dim + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, b: Bound) {
        self.m[i * self.dim + j] = b;
    }

    pub fn bound(&self, a: Var, b: Var) -> Bound {
        self.get(a.index(), b.index())
    }

    fn mark_empty(&mut self) {
        self.set(0, 0, Bound::LT_ZERO);
    }

    pub fn is_empty(&self) -> bool {
        self.get(0, 0) < Bound::LE_ZERO
    }

    /// Floyd–Warshall tightening; detects emptiness via negative diagonals.
    pub fn canonicalize(&mut self) {
        let n = self.dim;
        for k in 0..n {
            for i in 0..n {
                let ik = self.get(i, k);
                if ik.is_infinite() {
                    continue;
                }
                for j in 0..n {
                    let cand = ik.add(self.get(k, j));
                    if cand < self.get(i, j) {
                        self.set(i, j, cand);
                    }
                }
            }
            if (0..n).any(|i| self.get(i, i) < Bound::LE_ZERO) {
                self.mark_empty();
                return;
            }
        }
    }

    pub fn canonical(mut self) -> Zone {
        self.canonicalize();
        self
    }

    /// Intersects with `v_i - v_j ⋈ b` and restores canonical form in O(n²).
    pub fn constrain_raw(&mut self, i: usize, j: usize, b: Bound) {
        if self.is_empty() || b >= self.get(i, j) {
            return;
        }
        if self.get(j, i).add(b) < Bound::LE_ZERO {
            self.mark_empty();
            return;
        }
        // A canonical DBM gains at most one use of the new edge per shortest path.
        let n = self.dim;
        let row_j: Vec<Bound> = (0..n).map(|l| self.get(j, l)).collect();
        let col_i: Vec<Bound> = (0..n).map(|k| self.get(k, i)).collect();
        for (k, &to_i) in col_i.iter().enumerate() {
            let ki = to_i.add(b);
            if ki.is_infinite() {
                continue;
            }
            for (l, &from_j) in row_j.iter().enumerate() {
                let cand = ki.add(from_j);
                if cand < self.get(k, l) {
                    self.set(k, l, cand);
                }
            }
        }
    }

    /// Intersects with `var ⋈ c`.
    pub fn constrain(&mut self, var: Var, op: CmpOp, c: i64) {
        let x = var.index();
        match op {
            CmpOp::Lt => self.constrain_raw(x, 0, Bound::lt(c)),
            CmpOp::Le => self.constrain_raw(x, 0, Bound::le(c)),
            CmpOp::Gt => self.constrain_raw(0, x, Bound::lt(-c)),
            CmpOp::Ge => self.constrain_raw(0, x, Bound::le(-c)),
            CmpOp::Eq => {
                self.constrain_raw(x, 0, Bound::le(c));
                self.constrain_raw(0, x, Bound::le(-c));
            }
        }
    }

    pub fn constrained(mut self, var: Var, op: CmpOp, c: i64) -> Zone {
        self.constrain(var, op, c);
        self
    }

    /// Lets time pass: `{v + d | v ∈ Z, d ≥ 0}`.
    pub fn elapse(&mut self) -> Result<(), ZoneError> {
        if self.is_empty() {
            return Err(ZoneError::EmptyZone);
        }
        for i in 1..self.dim {
            self.set(i, 0, Bound::INFINITY);
        }
        Ok(())
    }

    pub fn elapsed(mut self) -> Result<Zone, ZoneError> {
        self.elapse()?;
        Ok(self)
    }

    /// Sets `var` to 0.
    pub fn reset(&mut self, var: Var) -> Result<(), ZoneError> {
        let r = match var {
            Var::Clock(_) => var.index(),
            Var::Observer => return Err(ZoneError::ObserverReset),
            Var::Zero => return Ok(()),
        };
        if self.is_empty() {
            return Err(ZoneError::EmptyZone);
        }
        for j in 0..self.dim {
            let zj = self.get(0, j);
            let jz = self.get(j, 0);
            self.set(r, j, zj);
            self.set(j, r, jz);
        }
        self.set(r, r, Bound::LE_ZERO);
        Ok(())
    }

    pub fn reset_all<I: IntoIterator<Item = Var>>(mut self, vars: I) -> Result<Zone, ZoneError> {
        for v in vars {
            self.reset(v)?;
        }
        Ok(self)
    }

    /// Forgets every constraint on `clock` except `clock > above`.
    ///
    /// When every valuation of the zone already has `clock > above`, and no
    /// guard or invariant compares `clock` with a constant larger than
    /// `above`, the released states behave exactly like the original ones
    /// (the clock's value can no longer influence any future step before its
    /// next reset), so the duration sets are unchanged.
    pub fn release_above(&mut self, clock: usize, above: i64) {
        let r = Var::Clock(clock).index();
        for j in 0..self.dim {
            if j != r {
                self.set(r, j, Bound::INFINITY);
                let b = self.get(j, 0).add(Bound::lt(-above));
                self.set(j, r, b);
            }
        }
        self.set(0, r, Bound::lt(-above));
        self.set(r, r, Bound::LE_ZERO);
    }

    /// Exact lower bound of a clock, as a bound on `-clock`.
    pub fn lower_bound(&self, var: Var) -> Bound {
        self.get(0, var.index())
    }

    /// `⟦other⟧ ⊆ ⟦self⟧`, decided entrywise on canonical forms.
    pub fn includes(&self, other: &Zone) -> Result<bool, ZoneError> {
        if self.dim != other.dim {
            return Err(ZoneError::DimensionMismatch(self.dim, other.dim));
        }
        if other.is_empty() {
            return Ok(true);
        }
        if self.is_empty() {
            return Ok(false);
        }
        Ok(self.m.iter().zip(&other.m).all(|(a, b)| b <= a))
    }

    /// The exact set of observer values occurring in the zone.
    pub fn project_observer(&self) -> Result<Interval, ZoneError> {
        if self.is_empty() {
            return Err(ZoneError::EmptyZone);
        }
        let low = self.get(0, 1);
        let high = self.get(1, 0);
        let lower = -low.value().expect("observer is bounded below by 0");
        Ok(Interval::new(lower, !low.is_strict(), high.value(), !high.is_strict())
            .expect("non-empty canonical zone has a non-empty projection"))
    }

    /// Membership of a point given in units of `1/scale`, ordered as
    /// `[observer, clock_0, clock_1, ...]`.
    pub fn contains_scaled(&self, point: &[i64], scale: i64) -> bool {
        assert_eq!(point.len() + 1, self.dim);
        if self.is_empty() {
            return false;
        }
        let val = |i: usize| if i == 0 { 0 } else { point[i - 1] };
        (0..self.dim).all(|i| {
            (0..self.dim).all(|j| i == j || self.get(i, j).admits_scaled(val(i) - val(j), scale))
        })
    }
}

impl fmt::Debug for Zone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("Zone(empty)");
        }
        let name = |i: usize| match i {
            0 => "0".to_string(),
            1 => "obs".to_string(),
            c => format!("c{}", c - 2),
        };
        let mut parts = Vec::new();
        for i in 0..self.dim {
            for j in 0..self.dim {
                let b = self.get(i, j);
                if i != j && !b.is_infinite() {
                    parts.push(format!("{}-{}{:?}", name(i), name(j), b));
                }
            }
        }
        write!(f, "Zone({})", parts.join(", "))
    }
}

impl PartialOrd for Zone {
    /// Inclusion order; `None` when incomparable or of different dimension.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.includes(other).ok()?, other.includes(self).ok()?) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Greater),
            (false, true) => Some(Ordering::Less),
            (false, false) => None,
        }
    }
}
