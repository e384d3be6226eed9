mod common;

use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(config(FROBENIUS_SEED))]
    #[test]
    fn frobenius_is_a_field_homomorphism(args in frobenius_strategy()) {
        frobenius_case(args)?;
    }
}

proptest! {
    #![proptest_config(config(VALUATION_SEED))]
    #[test]
    fn valuation_is_multiplicative(args in valuation_strategy()) {
        valuation_case(args)?;
    }
}

proptest! {
    #![proptest_config(config(MAZUR_SEED))]
    #[test]
    fn mazur_inequality_on_k_eps_mu_k(args in matrix_strategy(5)) {
        mazur_case(args)?;
    }
}

proptest! {
    #![proptest_config(config(CONJUGATION_SEED))]
    #[test]
    fn newton_point_is_sigma_conjugation_invariant(args in matrix_strategy(4)) {
        conjugation_case(args)?;
    }
}

proptest! {
    #![proptest_config(config(SOLVER_SEED))]
    #[test]
    fn solver_residual_meets_declared_precision(args in solver_strategy()) {
        solver_case(args)?;
    }
}
