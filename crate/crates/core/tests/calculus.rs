use proptest::prelude::*;
use rademacher_clt::chaos::{walsh_expand, ExactEnumerator};
use rademacher_clt::experiments::{calculus_suite, random_space};
use rademacher_clt::malliavin::{first_derivative, second_derivative, TableFunctional};
use rademacher_clt::Functional;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn identity_suite_small_batch() {
    let s = calculus_suite(8, 30, 11).unwrap();
    assert!(s.passed(1e-10), "{s:?}");
    assert_eq!(s.instances, 30);
}

#[test]
fn suite_rejects_oversized_spaces() {
    assert!(calculus_suite(40, 1, 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn walsh_roundtrip_and_parseval(seed in any::<u64>(), n in 1usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let space = random_space(n, &mut rng).unwrap();
        let f = TableFunctional::random(n, &mut rng);
        let dec = walsh_expand(&f, &space).unwrap();
        let e = ExactEnumerator::new(&space).unwrap();
        let values = e.tabulate(&f);
        for (m, v) in values.iter().enumerate() {
            prop_assert!((dec.reconstruct(&e.configuration(m)) - v).abs() < 1e-10);
        }
        let second = e.expect_with(|m| values[m] * values[m]);
        prop_assert!((dec.second_moment() - second).abs() <= 1e-10 * second.max(1.0));
    }

    #[test]
    fn gradient_coefficients_match_derivatives(seed in any::<u64>(), n in 2usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let space = random_space(n, &mut rng).unwrap();
        let f = TableFunctional::random(n, &mut rng);
        let dec = walsh_expand(&f, &space).unwrap();
        let w = space.sample(&mut rng);
        for k in 0..n {
            let g = dec.gradient(k).unwrap();
            prop_assert!((g.evaluate(&w) - first_derivative(&f, &space, &w, k).unwrap()).abs() < 1e-10);
            let l = (k + 1) % n;
            let gl = g.gradient(l).unwrap();
            prop_assert!((gl.evaluate(&w) - second_derivative(&f, &space, &w, k, l).unwrap()).abs() < 1e-10);
        }
    }
}
