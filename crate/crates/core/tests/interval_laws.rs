//! Laws of normalized interval sets.

mod laws;

const CASES: u32 = 1000;

#[test]
fn normalize_is_idempotent() {
    laws::intervals::normalize_is_idempotent(CASES).unwrap();
}

#[test]
fn normalize_preserves_membership() {
    laws::intervals::normalize_preserves_membership(CASES).unwrap();
}

#[test]
fn union_is_a_semilattice() {
    laws::intervals::union_is_a_semilattice(CASES).unwrap();
}

#[test]
fn equality_is_an_equivalence() {
    laws::intervals::equality_is_an_equivalence(CASES).unwrap();
}

#[test]
fn grid_points_are_a_union_homomorphism() {
    laws::intervals::grid_points_are_a_union_homomorphism(CASES).unwrap();
}

#[test]
fn equal_sets_have_equal_grid_points() {
    laws::intervals::equal_sets_have_equal_grid_points(CASES).unwrap();
}

#[test]
fn subset_agrees_with_points() {
    laws::intervals::subset_agrees_with_points(CASES).unwrap();
}
