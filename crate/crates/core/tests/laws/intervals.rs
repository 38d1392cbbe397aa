//! Laws of normalized interval sets, checked on random sets and against
//! pointwise membership on the half-unit grid.

use proptest::prelude::*;
use timed_opacity::{Granularity, GridTime, Interval, IntervalSet};

use super::{check, Law};

const REGRESSIONS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/laws/intervals.proptest-regressions");

pub const LAWS: &[Law] = &[
    ("normalize is idempotent", normalize_is_idempotent),
    ("normalize preserves membership", normalize_preserves_membership),
    ("union is a semilattice", union_is_a_semilattice),
    ("equality is an equivalence", equality_is_an_equivalence),
    ("grid points are a union homomorphism", grid_points_are_a_union_homomorphism),
    ("equal sets have equal grid points", equal_sets_have_equal_grid_points),
    ("subset agrees with points", subset_agrees_with_points),
];

fn interval() -> impl Strategy<Value = Interval> {
    (0i64..12, 0i64..6, any::<bool>(), any::<bool>(), prop::bool::weighted(0.15)).prop_filter_map(
        "empty interval",
        |(lo, len, lc, uc, unbounded)| {
            let upper = (!unbounded).then_some(lo + len);
            Interval::new(lo, lc, upper, uc).ok()
        },
    )
}

fn set() -> impl Strategy<Value = IntervalSet> {
    prop::collection::vec(interval(), 0..5).prop_map(IntervalSet::normalize)
}

fn granularity() -> impl Strategy<Value = Granularity> {
    prop_oneof![Just(Granularity::One), Just(Granularity::Half)]
}

/// Every half-unit point that can distinguish two sets built by `set()`.
fn probes() -> impl Iterator<Item = GridTime> {
    (0..=40).map(GridTime::from_halves)
}

fn same_points(a: &IntervalSet, b: &IntervalSet) -> bool {
    probes().all(|t| a.contains(t) == b.contains(t))
}

pub fn normalize_is_idempotent(cases: u32) -> Result<(), String> {
    check(REGRESSIONS, cases, set(), |s| {
        prop_assert_eq!(IntervalSet::normalize(s.intervals().to_vec()), s.clone());
        let rendered: IntervalSet = s.to_string().parse().unwrap();
        prop_assert_eq!(rendered, s);
        Ok(())
    })
}

pub fn normalize_preserves_membership(cases: u32) -> Result<(), String> {
    check(REGRESSIONS, cases, prop::collection::vec(interval(), 0..5), |raw| {
        let s = IntervalSet::normalize(raw.clone());
        for t in probes() {
            prop_assert_eq!(s.contains(t), raw.iter().any(|iv| iv.contains_scaled(t.halves(), 2)));
        }
        for w in s.intervals().windows(2) {
            prop_assert!(w[0].upper().is_some_and(|u| u <= w[1].lower()));
        }
        Ok(())
    })
}

pub fn union_is_a_semilattice(cases: u32) -> Result<(), String> {
    check(REGRESSIONS, cases, (set(), set(), set()), |(a, b, c)| {
        prop_assert_eq!(a.union(&b), b.union(&a));
        prop_assert_eq!(a.union(&b).union(&c), a.union(&b.union(&c)));
        prop_assert_eq!(a.union(&a), a.clone());
        prop_assert_eq!(a.union(&IntervalSet::empty()), a.clone());
        for t in probes() {
            prop_assert_eq!(a.union(&b).contains(t), a.contains(t) || b.contains(t));
            prop_assert_eq!(a.intersect(&b).contains(t), a.contains(t) && b.contains(t));
        }
        Ok(())
    })
}

pub fn equality_is_an_equivalence(cases: u32) -> Result<(), String> {
    check(REGRESSIONS, cases, (set(), set(), set(), 0i64..12), |(a, b, c, split)| {
        prop_assert!(a.equals(&a));
        prop_assert_eq!(a.equals(&b), b.equals(&a));
        if a.equals(&b) && b.equals(&c) {
            prop_assert!(a.equals(&c));
        }
        prop_assert_eq!(a.equals(&b), same_points(&a, &b));
        // Splitting an interval at an interior point does not change the set.
        let pieces: Vec<Interval> = a
            .intervals()
            .iter()
            .flat_map(|iv| {
                let inside = split > iv.lower() && iv.upper().is_none_or(|u| split < u);
                if inside {
                    vec![
                        Interval::new(iv.lower(), iv.lower_closed(), Some(split), true).unwrap(),
                        Interval::new(split, false, iv.upper(), iv.upper_closed()).unwrap(),
                    ]
                } else {
                    vec![*iv]
                }
            })
            .collect();
        prop_assert!(IntervalSet::normalize(pieces).equals(&a));
        Ok(())
    })
}

pub fn grid_points_are_a_union_homomorphism(cases: u32) -> Result<(), String> {
    check(REGRESSIONS, cases, (set(), set(), granularity(), 1i64..20), |(a, b, g, h)| {
        let mut expected = a.grid_points(g, h);
        expected.extend(b.grid_points(g, h));
        expected.sort();
        expected.dedup();
        prop_assert_eq!(a.union(&b).grid_points(g, h), expected);
        Ok(())
    })
}

pub fn equal_sets_have_equal_grid_points(cases: u32) -> Result<(), String> {
    check(REGRESSIONS, cases, (set(), set(), granularity(), 1i64..20), |(a, b, g, h)| {
        let a2 = IntervalSet::normalize(a.intervals().iter().rev().copied());
        prop_assert_eq!(a.grid_points(g, h), a2.grid_points(g, h));
        if a.equals(&b) {
            prop_assert_eq!(a.grid_points(g, h), b.grid_points(g, h));
        }
        for t in a.grid_points(g, h) {
            prop_assert!(a.contains(t) && t.halves() % g.step_halves() == 0 && t.halves() <= 2 * h);
        }
        Ok(())
    })
}

pub fn subset_agrees_with_points(cases: u32) -> Result<(), String> {
    check(REGRESSIONS, cases, (set(), set()), |(a, b)| {
        let pointwise = probes().all(|t| !a.contains(t) || b.contains(t));
        prop_assert_eq!(a.is_subset(&b), pointwise);
        prop_assert!(a.intersect(&b).is_subset(&a));
        prop_assert!(a.is_subset(&a.union(&b)));
        Ok(())
    })
}
