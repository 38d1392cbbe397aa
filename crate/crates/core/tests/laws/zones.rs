//! Algebraic laws of the DBM operations, on zones built by random operation
//! sequences and checked against points on the half-unit grid.

use proptest::prelude::*;
use timed_opacity::model::CmpOp;
use timed_opacity::zones::{Bound, Var, Zone};

use super::{check, Law};

const REGRESSIONS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/laws/zones.proptest-regressions");

const CLOCKS: usize = 2;
const SCALE: i64 = 2;

pub const LAWS: &[Law] = &[
    ("canonicalization is idempotent", canonicalization_is_idempotent),
    ("canonicalization preserves points", canonicalization_preserves_points),
    ("incremental tightening matches full closure", incremental_tightening_matches_full_closure),
    ("inclusion is a preorder", inclusion_is_a_preorder),
    ("inclusion is antisymmetric", inclusion_is_antisymmetric),
    ("inclusion agrees with points", inclusion_agrees_with_points),
    ("elapse and constrain are monotone", elapse_and_constrain_are_monotone),
    ("operations are sound on grid points", operations_are_sound_on_grid_points),
    ("release forgets only the released clock", release_forgets_only_the_released_clock),
];

#[derive(Debug, Clone)]
enum Op {
    Constrain(Var, CmpOp, i64),
    Diagonal(usize, usize, Bound),
    Elapse,
    Reset(usize),
}

fn var() -> impl Strategy<Value = Var> {
    prop_oneof![Just(Var::Observer), (0..CLOCKS).prop_map(Var::Clock)]
}

fn op_kind() -> impl Strategy<Value = CmpOp> {
    prop_oneof![Just(CmpOp::Lt), Just(CmpOp::Le), Just(CmpOp::Eq), Just(CmpOp::Ge), Just(CmpOp::Gt)]
}

fn bound() -> impl Strategy<Value = Bound> {
    (-6i64..7, any::<bool>()).prop_map(|(v, strict)| Bound::new(v, strict))
}

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![
        3 => (var(), op_kind(), 0i64..8).prop_map(|(v, o, c)| Op::Constrain(v, o, c)),
        1 => (1..CLOCKS + 2, 1..CLOCKS + 2, bound()).prop_map(|(i, j, b)| Op::Diagonal(i, j, b)),
        2 => Just(Op::Elapse),
        1 => (0..CLOCKS).prop_map(Op::Reset),
    ]
}

fn apply(z: &mut Zone, op: &Op) {
    if z.is_empty() {
        return;
    }
    match *op {
        Op::Constrain(v, o, c) => z.constrain(v, o, c),
        Op::Diagonal(i, j, b) if i != j => z.constrain_raw(i, j, b),
        Op::Diagonal(..) => {}
        Op::Elapse => z.elapse().unwrap(),
        Op::Reset(c) => z.reset(Var::Clock(c)).unwrap(),
    }
}

fn zone() -> impl Strategy<Value = Zone> {
    prop::collection::vec(op(), 0..8).prop_map(|ops| {
        let mut z = Zone::init(CLOCKS);
        for o in &ops {
            apply(&mut z, o);
        }
        z
    })
}

/// A zone together with a grid point `[observer, clocks..]` (half units)
/// that the same operations carried along; constraints the point violates
/// are skipped, so the point must end up inside.
fn zone_with_point() -> impl Strategy<Value = (Zone, Vec<i64>)> {
    prop::collection::vec((op(), 0i64..5), 0..10).prop_map(|ops| {
        let mut z = Zone::init(CLOCKS);
        let mut p = vec![0; CLOCKS + 1];
        for (o, d) in &ops {
            match *o {
                Op::Constrain(v, op, c) if !holds(op, p[v.index() - 1], c) => continue,
                Op::Diagonal(i, j, b) if i != j && !b.admits_scaled(p[i - 1] - p[j - 1], SCALE) => continue,
                Op::Elapse => p.iter_mut().for_each(|x| *x += d),
                Op::Reset(c) => p[c + 1] = 0,
                _ => {}
            }
            apply(&mut z, o);
        }
        (z, p)
    })
}

/// A point `[observer, clocks..]` in half units.
fn point() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(0i64..20, CLOCKS + 1)
}

/// Raw 4x4 matrices with a zero diagonal.
fn matrix() -> impl Strategy<Value = Vec<Bound>> {
    prop::collection::vec(prop_oneof![bound(), Just(Bound::INFINITY)], 16).prop_map(|mut entries| {
        for i in 0..4 {
            entries[i * 4 + i] = Bound::LE_ZERO;
        }
        entries
    })
}

fn holds(op: CmpOp, value: i64, c: i64) -> bool {
    op.holds(value, c * SCALE)
}

pub fn canonicalization_is_idempotent(cases: u32) -> Result<(), String> {
    check(REGRESSIONS, cases, matrix(), |entries| {
        let once = Zone::from_matrix(4, entries).canonical();
        let twice = once.clone().canonical();
        prop_assert_eq!(once, twice);
        Ok(())
    })
}

pub fn canonicalization_preserves_points(cases: u32) -> Result<(), String> {
    check(REGRESSIONS, cases, (matrix(), point()), |(entries, p)| {
        let raw = Zone::from_matrix(4, entries.clone());
        let val = |i: usize| if i == 0 { 0 } else { p[i - 1] };
        let inside = (0..4).all(|i| (0..4).all(|j| entries[i * 4 + j].admits_scaled(val(i) - val(j), SCALE)));
        prop_assert_eq!(raw.canonical().contains_scaled(&p, SCALE), inside);
        Ok(())
    })
}

pub fn incremental_tightening_matches_full_closure(cases: u32) -> Result<(), String> {
    let inputs = (zone_with_point(), 0..CLOCKS + 2, 1..CLOCKS + 2, bound());
    check(REGRESSIONS, cases, inputs, |((z, _), i, offset, b)| {
        let j = (i + offset) % (CLOCKS + 2);
        let n = z.dim();
        let mut entries: Vec<Bound> = (0..n * n).map(|k| z.get(k / n, k % n)).collect();
        entries[i * n + j] = entries[i * n + j].min(b);
        let full = Zone::from_matrix(n, entries).canonical();
        let mut fast = z.clone();
        fast.constrain_raw(i, j, b);
        prop_assert!(fast == full || (fast.is_empty() && full.is_empty()), "{:?} vs {:?}", fast, full);
        Ok(())
    })
}

pub fn inclusion_is_a_preorder(cases: u32) -> Result<(), String> {
    check(REGRESSIONS, cases, (zone(), zone(), zone()), |(a, b, c)| {
        prop_assert!(a.includes(&a).unwrap());
        if a.includes(&b).unwrap() && b.includes(&c).unwrap() {
            prop_assert!(a.includes(&c).unwrap());
        }
        Ok(())
    })
}

pub fn inclusion_is_antisymmetric(cases: u32) -> Result<(), String> {
    check(REGRESSIONS, cases, (zone(), prop::collection::vec(op(), 0..3)), |(a, extra)| {
        let mut b = a.clone();
        for o in &extra {
            apply(&mut b, o);
        }
        if a.includes(&b).unwrap() && b.includes(&a).unwrap() {
            prop_assert!(a == b || (a.is_empty() && b.is_empty()));
        }
        Ok(())
    })
}

pub fn inclusion_agrees_with_points(cases: u32) -> Result<(), String> {
    check(REGRESSIONS, cases, (zone(), zone(), point()), |(a, b, p)| {
        if a.includes(&b).unwrap() && b.contains_scaled(&p, SCALE) {
            prop_assert!(a.contains_scaled(&p, SCALE));
        }
        Ok(())
    })
}

pub fn elapse_and_constrain_are_monotone(cases: u32) -> Result<(), String> {
    let atom = || (var(), op_kind(), 0i64..8);
    let inputs = (zone_with_point(), atom(), prop::collection::vec(atom(), 0..3));
    check(REGRESSIONS, cases, inputs, |((a, p), (v, op, c), extra)| {
        let mut b = a.clone();
        for &(v, op, c) in &extra {
            if holds(op, p[v.index() - 1], c) {
                b.constrain(v, op, c);
            }
        }
        prop_assert!(a.includes(&b).unwrap() && !b.is_empty());
        prop_assert!(a.clone().constrained(v, op, c).includes(&b.clone().constrained(v, op, c)).unwrap());
        prop_assert!(a.includes(&a.clone().constrained(v, op, c)).unwrap());
        let ea = a.clone().elapsed().unwrap();
        prop_assert!(ea.includes(&b.clone().elapsed().unwrap()).unwrap());
        prop_assert!(ea.includes(&a).unwrap());
        Ok(())
    })
}

pub fn operations_are_sound_on_grid_points(cases: u32) -> Result<(), String> {
    let inputs = (zone_with_point(), 0i64..6, (var(), op_kind(), 0i64..8), 0..CLOCKS);
    check(REGRESSIONS, cases, inputs, |((z, p), d, (v, op, k), c)| {
        prop_assert!(z.contains_scaled(&p, SCALE));
        // Time elapse keeps the point moving diagonally.
        let later: Vec<i64> = p.iter().map(|x| x + d).collect();
        prop_assert!(z.clone().elapsed().unwrap().contains_scaled(&later, SCALE));
        // Constraining keeps exactly the points satisfying the atom.
        let value = p[v.index() - 1];
        prop_assert_eq!(z.clone().constrained(v, op, k).contains_scaled(&p, SCALE), holds(op, value, k));
        // Reset moves the clock to 0.
        let mut reset = p.clone();
        reset[c + 1] = 0;
        let mut r = z.clone();
        r.reset(Var::Clock(c)).unwrap();
        prop_assert!(r.contains_scaled(&reset, SCALE));
        // The observer projection contains the observer value.
        let obs = z.project_observer().unwrap();
        prop_assert!(obs.contains_scaled(p[0], SCALE));
        Ok(())
    })
}

pub fn release_forgets_only_the_released_clock(cases: u32) -> Result<(), String> {
    check(REGRESSIONS, cases, (zone_with_point(), 0i64..4, 0i64..7), |((z, p), seed, shift)| {
        let c = (0..CLOCKS).max_by_key(|&c| p[c + 1]).unwrap();
        if p[c + 1] == 0 {
            return Ok(());
        }
        let above = seed.min((p[c + 1] - 1) / SCALE);
        let mut r = z.clone();
        r.release_above(c, above);
        prop_assert!(r.contains_scaled(&p, SCALE));
        let mut moved = p.clone();
        moved[c + 1] = above * SCALE + 1 + shift;
        prop_assert!(r.contains_scaled(&moved, SCALE));
        moved[c + 1] = above * SCALE;
        prop_assert!(!r.contains_scaled(&moved, SCALE));
        Ok(())
    })
}
