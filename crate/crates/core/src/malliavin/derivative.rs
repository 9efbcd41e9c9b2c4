use std::collections::BTreeMap;

use super::{Configuration, Functional, RademacherSpace};
use crate::Result;

/// `D_k F(ω) = sqrt(p_k q_k) (F(ω_+^k) − F(ω_−^k))`.
pub fn first_derivative<F: Functional + ?Sized>(
    f: &F,
    space: &RademacherSpace,
    omega: &Configuration,
    k: usize,
) -> Result<f64> {
    space.check_index(k)?;
    space.check_configuration(omega)?;
    Ok(first_derivative_unchecked(f, space, omega, k))
}

#[inline]
pub fn first_derivative_unchecked<F: Functional + ?Sized>(
    f: &F,
    space: &RademacherSpace,
    omega: &Configuration,
    k: usize,
) -> f64 {
    space.sqrt_pq(k) * f.flip_difference(omega, k)
}

/// `D_ℓ (D_k F)(ω)`, evaluated by iterating the two-point definition.
pub fn second_derivative<F: Functional + ?Sized>(
    f: &F,
    space: &RademacherSpace,
    omega: &Configuration,
    k: usize,
    l: usize,
) -> Result<f64> {
    space.check_index(k)?;
    space.check_index(l)?;
    space.check_configuration(omega)?;
    let mut w = omega.clone();
    Ok(second_derivative_mut(f, space, &mut w, k, l))
}

/// As [`second_derivative`] but flips coordinate `ℓ` of `omega` in place and
/// restores it before returning.
#[inline]
pub fn second_derivative_mut<F: Functional + ?Sized>(
    f: &F,
    space: &RademacherSpace,
    omega: &mut Configuration,
    k: usize,
    l: usize,
) -> f64 {
    if k == l {
        // D_k F does not depend on ω_k.
        return 0.0;
    }
    let saved = omega.is_plus(l);
    omega.set(l, true);
    let plus = f.flip_difference(omega, k);
    omega.set(l, false);
    let minus = f.flip_difference(omega, k);
    omega.set(l, saved);
    space.sqrt_pq(k) * space.sqrt_pq(l) * (plus - minus)
}

/// Four-point form `sqrt(p_k q_k p_ℓ q_ℓ)(F^{++} − F^{+−} − F^{−+} + F^{−−})`
/// for `k ≠ ℓ`, evaluated without `flip_difference`.
pub fn second_derivative_four_point<F: Functional + ?Sized>(
    f: &F,
    space: &RademacherSpace,
    omega: &Configuration,
    k: usize,
    l: usize,
) -> Result<f64> {
    space.check_index(k)?;
    space.check_index(l)?;
    if k == l {
        return Ok(0.0);
    }
    let mut w = omega.clone();
    let mut at = |a: bool, b: bool| {
        w.set(k, a);
        w.set(l, b);
        f.evaluate(&w)
    };
    let s = at(true, true) - at(true, false) - at(false, true) + at(false, false);
    Ok(space.sqrt_pq(k) * space.sqrt_pq(l) * s)
}

/// Residual of the product formula
/// `D_k(FG) = (D_kF)G + F(D_kG) − X_k/sqrt(p_k q_k) (D_kF)(D_kG)` at `ω`.
pub fn verify_product_rule<F, G>(
    f: &F,
    g: &G,
    space: &RademacherSpace,
    omega: &Configuration,
    k: usize,
) -> Result<f64>
where
    F: Functional + ?Sized,
    G: Functional + ?Sized,
{
    space.check_index(k)?;
    space.check_configuration(omega)?;
    let s = space.sqrt_pq(k);
    let (fp, fm, gp, gm) = {
        let mut w = omega.clone();
        w.set(k, true);
        let (fp, gp) = (f.evaluate(&w), g.evaluate(&w));
        w.set(k, false);
        (fp, f.evaluate(&w), gp, g.evaluate(&w))
    };
    let lhs = s * (fp * gp - fm * gm);
    let (df, dg) = (s * (fp - fm), s * (gp - gm));
    let (fv, gv) = (f.evaluate(omega), g.evaluate(omega));
    let rhs = df * gv + fv * dg - omega.sign(k) / s * df * dg;
    Ok((lhs - rhs).abs())
}

/// First and second derivatives of a functional at one configuration.
///
/// Only coordinates in the declared support (or all coordinates) are stored;
/// second derivatives follow the sparsity oracle.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DerivativeTable {
    pub first: BTreeMap<usize, f64>,
    pub second: BTreeMap<(usize, usize), f64>,
}

impl DerivativeTable {
    pub fn compute<F: Functional + ?Sized>(
        f: &F,
        space: &RademacherSpace,
        omega: &Configuration,
    ) -> Result<Self> {
        space.check_configuration(omega)?;
        let coords = f.support().unwrap_or_else(|| (0..space.len()).collect());
        let mut table = Self::default();
        let mut w = omega.clone();
        for &k in &coords {
            space.check_index(k)?;
            table.first.insert(k, first_derivative_unchecked(f, space, omega, k));
            let partners = f
                .second_derivative_support(k)
                .unwrap_or_else(|| (0..space.len()).filter(|&l| l != k).collect());
            for l in partners {
                space.check_index(l)?;
                table
                    .second
                    .insert((k, l), second_derivative_mut(f, space, &mut w, k, l));
            }
        }
        Ok(table)
    }

    pub fn first(&self, k: usize) -> f64 {
        self.first.get(&k).copied().unwrap_or(0.0)
    }

    pub fn second(&self, k: usize, l: usize) -> f64 {
        self.second.get(&(k, l)).copied().unwrap_or(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::malliavin::{all_configurations, Constant, Polynomial, TableFunctional};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn y1y2(space: &RademacherSpace) -> Polynomial {
        Polynomial::monomial(space, &[0, 1]).unwrap()
    }

    #[test]
    fn derivative_examples() {
        for p in [0.5, 0.25, 0.9] {
            let s = RademacherSpace::homogeneous(3, p).unwrap();
            let y1 = Polynomial::monomial(&s, &[0]).unwrap();
            for w in all_configurations(3) {
                assert!((first_derivative(&y1, &s, &w, 0).unwrap() - 1.0).abs() < 1e-14);
                assert_eq!(first_derivative(&Constant(2.0), &s, &w, 1).unwrap(), 0.0);
                for (k, l) in [(0, 1), (1, 0), (0, 0), (2, 1)] {
                    assert!(second_derivative(&y1, &s, &w, k, l).unwrap().abs() < 1e-14);
                }
            }
        }
        let s = RademacherSpace::homogeneous(3, 0.5).unwrap();
        let f = y1y2(&s);
        let w = Configuration::from_signs(&[-1, 1, -1]).unwrap();
        assert!((first_derivative(&f, &s, &w, 0).unwrap() - 1.0).abs() < 1e-14);
        assert!((second_derivative(&f, &s, &w, 0, 1).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(second_derivative(&f, &s, &w, 0, 2).unwrap(), 0.0);
        assert!(first_derivative(&f, &s, &w, 3).is_err());
    }

    #[test]
    fn product_rule_simple_cases() {
        let s = RademacherSpace::homogeneous(2, 0.5).unwrap();
        let y1 = Polynomial::monomial(&s, &[0]).unwrap();
        for w in all_configurations(2) {
            assert!(verify_product_rule(&y1, &y1, &s, &w, 0).unwrap() < 1e-15);
            assert!(verify_product_rule(&Constant(3.0), &y1, &s, &w, 1).unwrap() < 1e-15);
        }
    }

    #[test]
    fn product_rule_random_polynomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = RademacherSpace::new(vec![0.1, 0.3, 0.45, 0.5, 0.7, 0.95]).unwrap();
        let f = Polynomial::random(&s, &mut rng, 4, 8);
        let g = Polynomial::random(&s, &mut rng, 4, 8);
        for _ in 0..100 {
            let w = s.sample(&mut rng);
            for k in 0..6 {
                assert!(verify_product_rule(&f, &g, &s, &w, k).unwrap() < 1e-10);
            }
        }
    }

    #[test]
    fn table_respects_sparsity() {
        let s = RademacherSpace::homogeneous(4, 0.3).unwrap();
        let f = y1y2(&s);
        let t = DerivativeTable::compute(&f, &s, &Configuration::all_plus(4)).unwrap();
        assert_eq!(t.first.keys().copied().collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(t.second.keys().copied().collect::<Vec<_>>(), vec![(0, 1), (1, 0)]);
        assert!((t.second(0, 1) - s.p(0) * s.q(0) * (s.y(0, true) - s.y(0, false)).powi(2)).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn flip_independence_and_symmetry(seed in any::<u64>(), n in 2usize..8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p: Vec<f64> = (0..n).map(|_| rand::Rng::random_range(&mut rng, 0.05..0.95)).collect();
            let s = RademacherSpace::new(p).unwrap();
            let f = TableFunctional::random(n, &mut rng);
            let w = s.sample(&mut rng);
            for k in 0..n {
                let d = first_derivative(&f, &s, &w, k).unwrap();
                let mut flipped = w.clone();
                flipped.flip(k);
                prop_assert_eq!(d, first_derivative(&f, &s, &flipped, k).unwrap());
                for l in 0..n {
                    let a = second_derivative(&f, &s, &w, k, l).unwrap();
                    let b = second_derivative(&f, &s, &w, l, k).unwrap();
                    prop_assert!((a - b).abs() < 1e-12);
                    let c = second_derivative_four_point(&f, &s, &w, k, l).unwrap();
                    prop_assert!((a - c).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn outside_support_is_zero(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = RademacherSpace::homogeneous(8, 0.4).unwrap();
            let f = Polynomial::random(&s, &mut rng, 3, 3);
            let support = f.support().unwrap();
            let w = s.sample(&mut rng);
            for k in (0..8).filter(|k| !support.contains(k)) {
                prop_assert_eq!(first_derivative(&f, &s, &w, k).unwrap(), 0.0);
            }
        }

        #[test]
        fn product_rule_holds(seed in any::<u64>(), n in 1usize..=10) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p: Vec<f64> = (0..n).map(|_| rand::Rng::random_range(&mut rng, 0.02..0.98)).collect();
            let s = RademacherSpace::new(p).unwrap();
            let f = Polynomial::random(&s, &mut rng, 3, 5);
            let g = TableFunctional::random(n, &mut rng);
            let w = s.sample(&mut rng);
            for k in 0..n {
                prop_assert!(verify_product_rule(&f, &g, &s, &w, k).unwrap() < 1e-10);
            }
        }
    }
}
