use gptk::dacey::{dacey_cover, derandomize, simulate_check};
use gptk::linalg::sum;
use gptk::modj::boolean_testspace;
use gptk::rational::int;
use gptk::sample;
use gptk::systems::{single_test, triangle, two_binary_tests};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn cover_maps_have_the_expected_shape() {
    for ts in [single_test(&["x", "y", "z"]), two_binary_tests(), triangle(), boolean_testspace(2).unwrap()] {
        let a = dacey_cover(&ts).unwrap().audit();
        assert!(a.pi_test_preserving && a.pi_onto && !a.pi_injective);
        assert!(a.psi_test_preserving && a.psi_injective && !a.psi_outcome_preserving);
        assert!(a.factorization);
    }
}

#[test]
fn cover_weights_factor_on_vertices() {
    for ts in [single_test(&["x", "y"]), two_binary_tests(), triangle()] {
        assert!(dacey_cover(&ts).unwrap().factorization_on_vertices().unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn derandomization_simulates_every_state(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let space = sample::space(&mut rng);
        let ts = match rng.gen_range(0..3) {
            0 => single_test(&["x", "y", "z", "w"]),
            1 => two_binary_tests(),
            _ => triangle(),
        };
        let f = sample::valued_weight(&mut rng, &space, &ts);
        let Ok(d) = derandomize(&f) else {
            // Zero values are rejected by design.
            prop_assert!(!gptk::dacey::approx_classes(&f).zero_outcomes.is_empty());
            return Ok(());
        };
        prop_assert!(d.representative_independent);
        prop_assert!(d.equal_sum_cells.is_empty());
        for t in d.hat_testspace.tests() {
            let total = sum(space.dim(), t.iter().map(|&c| d.hat_weight.value(c)));
            prop_assert_eq!(&total, space.unit());
        }
        for c in &d.cells {
            prop_assert_eq!(c.die.iter().fold(int(0), |s, p| s + p), int(1));
        }
        let before = d.clone();
        for _ in 0..3 {
            let phi = sample::state(&mut rng, &space);
            prop_assert!(simulate_check(&f, &d, &phi).unwrap());
        }
        prop_assert_eq!(before, d);
    }
}
