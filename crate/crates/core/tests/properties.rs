mod common;

use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mu_keeps_other_completions(l in lattice_strategy(4), p in prop::sample::select(vec![2u64, 3, 5])) {
        mu_localization(&l, p)?;
    }

    #[test]
    fn ternary_form_round_trip(f in form_strategy(3)) {
        form_round_trip(&f)?;
    }

    #[test]
    fn quaternary_form_round_trip(f in form_strategy(4)) {
        form_round_trip(&f)?;
    }

    #[test]
    fn canonical_form_is_a_class_invariant(l in lattice_strategy(4), u in unimodular_strategy(4)) {
        reduce_invariance(&l, &u)?;
    }

    #[test]
    fn ternary_canonical_form(l in lattice_strategy(3), u in unimodular_strategy(3)) {
        reduce_invariance(&l, &u)?;
    }

    #[test]
    fn neighbours_share_the_genus(l in lattice_strategy(4)) {
        neighbours_in_genus(&l)?;
    }

    #[test]
    fn spinor_genus_counts(l in lattice_strategy(4)) {
        spinor_counts(&l)?;
    }
}
