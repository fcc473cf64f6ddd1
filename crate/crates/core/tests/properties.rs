mod common;

use common::props::{alpha_monotone, arb_case, breaking_rule_monotone, eta_scale_invariance, unit_speed};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn eta_is_scale_invariant(case in arb_case(7), c in 0.01f64..100.0) {
        eta_scale_invariance(&case, c)?;
    }

    #[test]
    fn alpha_never_decreases(case in arb_case(7), s in any::<u64>()) {
        alpha_monotone(&case, s)?;
    }

    #[test]
    fn trajectories_move_at_unit_speed(case in arb_case(7)) {
        unit_speed(&case)?;
    }

    #[test]
    fn breaking_rule_never_delays(case in arb_case(7)) {
        breaking_rule_monotone(&case)?;
    }
}
