use gptk::channel::{induced_morphism, markov_compose, markov_dual, LinearMap};
use gptk::composite::{max_cone_contains, min_cone_contains, monoidal_map, BilinearRule};
use gptk::modj::lift_state;
use gptk::rational::{int, ivec, q};
use gptk::sample;
use gptk::systems::{bit, classical, delta_bit_catalog, enriched_bit_catalog, gbit, gbit_model, realized_catalog};
use gptk::{Catalog, OrderUnitSpace, Outcome};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rotation() -> LinearMap {
    LinearMap::new(gbit(), gbit(), vec![ivec(&[1, 0, 0]), ivec(&[0, 0, 1]), ivec(&[0, 1, 0])]).unwrap()
}

fn mixing() -> LinearMap {
    LinearMap::new(bit(), bit(), vec![vec![q(2, 3), q(1, 3)], vec![q(1, 3), q(2, 3)]]).unwrap()
}

fn three_way() -> Catalog {
    let f = gptk::ValuedWeight::new(
        classical(3),
        gptk::systems::single_test(&["a", "b", "c"]),
        vec![ivec(&[1, 0, 0]), ivec(&[0, 1, 0]), ivec(&[0, 0, 1])],
    )
    .unwrap();
    realized_catalog(&f).unwrap()
}

fn cases() -> Vec<(LinearMap, LinearMap, Catalog)> {
    let to3 = LinearMap::new(
        bit(),
        classical(3),
        vec![ivec(&[1, 0]), vec![q(1, 2), q(1, 2)], ivec(&[0, 1])],
    )
    .unwrap();
    // Kills (0, 0, 1).
    let from3 = LinearMap::new(classical(3), bit(), vec![ivec(&[1, 0, 0]), vec![q(1, 2), q(1, 2), int(0)]]).unwrap();
    vec![
        (mixing(), to3.clone(), delta_bit_catalog()),
        (mixing(), mixing(), enriched_bit_catalog()),
        (to3, from3.clone(), enriched_bit_catalog()),
        (from3, mixing(), three_way()),
        (rotation(), rotation(), realized_catalog(&gbit_model()).unwrap()),
    ]
}

#[test]
fn identity_induces_identity() {
    for (phi, _, cat) in cases() {
        let m = induced_morphism(&LinearMap::identity(phi.domain()), &cat).unwrap();
        for (x, y) in m.outcome_table() {
            assert_eq!(Some(x), y);
        }
    }
}

#[test]
fn induced_morphisms_compose() {
    for (first, second, cat) in cases() {
        let m1 = induced_morphism(&first, &cat).unwrap();
        let m2 = induced_morphism(&second, &m1.image_catalog).unwrap();
        let m12 = induced_morphism(&second.after(&first).unwrap(), &cat).unwrap();
        let t1 = m1.outcome_table();
        let t2 = m2.outcome_table();
        for (x, direct) in m12.outcome_table() {
            let via = t1[&x].as_ref().and_then(|y| t2[y].clone());
            assert_eq!(direct, via, "at {x}");
        }
        assert!(m1.test_preserving && m2.test_preserving && m12.test_preserving);
        assert!(m1.locally_injective && m12.locally_injective);
    }
}

#[test]
fn pullback_commutes_with_lifting() {
    for (phi, _, cat) in cases() {
        let m = induced_morphism(&phi, &cat).unwrap();
        for psi in phi.codomain().state_polytope_vertices().unwrap() {
            let direct = lift_state(&m.source, &phi.pull_state(&psi)).unwrap();
            let via = m.pullback(&lift_state(&m.target, &psi).unwrap());
            assert_eq!(direct, via);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn markov_duality_is_contravariant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b, c) = (rng.gen_range(1..=5), rng.gen_range(1..=5), rng.gen_range(1..=5));
        let k = sample::stochastic(&mut rng, a, b);
        let j = sample::stochastic(&mut rng, b, c);
        let lhs = markov_dual(&markov_compose(&j, &k).unwrap());
        let rhs = markov_dual(&k).after(&markov_dual(&j)).unwrap();
        prop_assert_eq!(lhs.matrix(), rhs.matrix());
        prop_assert!(markov_dual(&k).is_channel().unwrap());
    }

    #[test]
    fn min_cone_lies_in_max_cone(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pick = |rng: &mut ChaCha8Rng| -> OrderUnitSpace {
            match rng.gen_range(0..4) { 0 => bit(), 1 => gbit(), 2 => classical(3), _ => sample::polyhedral_space(rng) }
        };
        let (a, b) = (pick(&mut rng), pick(&mut rng));
        let t = sample::tensor(&mut rng, &a, &b);
        if min_cone_contains(&a, &b, &t).unwrap() {
            prop_assert!(max_cone_contains(&a, &b, &t).unwrap());
        }
    }

    #[test]
    fn classical_tensor_cones_coincide(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = sample::tensor(&mut rng, &bit(), &bit());
        prop_assert_eq!(min_cone_contains(&bit(), &bit(), &t).unwrap(), max_cone_contains(&bit(), &bit(), &t).unwrap());
    }
}

#[test]
fn swapping_factors_swaps_the_monoidal_map() {
    let ga = realized_catalog(&gbit_model()).unwrap();
    let ba = delta_bit_catalog();
    for rule in [BilinearRule::min_rule(&gbit(), &bit()).unwrap(), BilinearRule::max_rule(&gbit(), &bit()).unwrap()] {
        let direct = monoidal_map(&rule, &ga, &ba).unwrap();
        let swapped = monoidal_map(&rule.swapped(), &ba, &ga).unwrap();
        let flip = |o: &Outcome| {
            let (idx, eff) = o.as_labeled().unwrap();
            let (x, y) = idx.as_pair().unwrap();
            Outcome::labeled(Outcome::pair(y.clone(), x.clone()), eff.clone())
        };
        let a: std::collections::BTreeSet<Outcome> = direct.target.outcomes().iter().map(flip).collect();
        let b: std::collections::BTreeSet<Outcome> = swapped.target.outcomes().iter().cloned().collect();
        assert_eq!(a, b);
        let (nl, nr) = (direct.left.num_outcomes(), direct.right.num_outcomes());
        for x in 0..nl {
            for y in 0..nr {
                let d = direct.map[x * nr + y].map(|t| flip(direct.target.outcome(t)));
                let s = swapped.map[y * nl + x].map(|t| swapped.target.outcome(t).clone());
                assert_eq!(d, s);
            }
        }
    }
}
