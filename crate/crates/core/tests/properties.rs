//! Randomized exact identities driven by proptest. Every case is an exact
//! computation over the Gaussian rationals, so one counterexample is a bug.

use gkred::identities;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn polynomial_ring_axioms(seed in any::<u64>()) {
        prop_assert_eq!(identities::ring_axioms(seed), Ok(()));
    }

    #[test]
    fn rational_function_field_axioms(seed in any::<u64>()) {
        prop_assert_eq!(identities::field_axioms(seed), Ok(()));
    }

    #[test]
    fn vector_field_jacobi(seed in any::<u64>()) {
        prop_assert_eq!(identities::jacobi(seed), Ok(()));
    }

    #[test]
    fn exterior_derivative_squares_to_zero(seed in any::<u64>()) {
        prop_assert_eq!(identities::d_squared(seed), Ok(()));
    }

    #[test]
    fn cartan_formulas(seed in any::<u64>()) {
        prop_assert_eq!(identities::cartan(seed), Ok(()));
    }

    #[test]
    fn clifford_relation(seed in any::<u64>()) {
        prop_assert_eq!(identities::clifford_relation(seed), Ok(()));
    }

    #[test]
    fn twisted_bracket_is_leibniz(seed in any::<u64>()) {
        prop_assert_eq!(identities::dorfman_leibniz(seed), Ok(()));
    }
}
