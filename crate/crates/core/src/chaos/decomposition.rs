use super::ExactEnumerator;
use crate::malliavin::{Configuration, Functional, RademacherSpace};
use crate::util::factorial;
use crate::{Error, Result};

/// Coefficients `c_A = E[F Y_A]` of a functional in the Walsh basis
/// `Y_A = ∏_{k∈A} Y_k`, indexed by the subset mask of `A`.
#[derive(Clone, Debug)]
pub struct ChaosDecomposition {
    space: RademacherSpace,
    coefficients: Vec<f64>,
}

/// Expands a table of values (indexed by configuration mask) in place.
///
/// For one coordinate the map is `c_∅ = p f₊ + q f₋`, `c_{k} = sqrt(pq)(f₊ − f₋)`;
/// the full transform is the tensor product of these.
fn forward_transform(space: &RademacherSpace, values: &mut [f64]) {
    for k in 0..space.len() {
        let b = 1usize << k;
        let (p, q, s) = (space.p(k), space.q(k), space.sqrt_pq(k));
        for m in 0..values.len() {
            if m & b == 0 {
                let (fm, fp) = (values[m], values[m | b]);
                values[m] = p * fp + q * fm;
                values[m | b] = s * (fp - fm);
            }
        }
    }
}

fn inverse_transform(space: &RademacherSpace, coeffs: &mut [f64]) {
    for k in 0..space.len() {
        let b = 1usize << k;
        let (yp, ym) = (space.y(k, true), space.y(k, false));
        for m in 0..coeffs.len() {
            if m & b == 0 {
                let (c0, c1) = (coeffs[m], coeffs[m | b]);
                coeffs[m] = c0 + c1 * ym;
                coeffs[m | b] = c0 + c1 * yp;
            }
        }
    }
}

/// Chaos expansion of `f` by exact enumeration.
pub fn walsh_expand<F: Functional + ?Sized>(
    f: &F,
    space: &RademacherSpace,
) -> Result<ChaosDecomposition> {
    let e = ExactEnumerator::new(space)?;
    Ok(ChaosDecomposition::from_values(space, e.tabulate(f)))
}

impl ChaosDecomposition {
    /// Expands a table of function values.
    pub fn from_values(space: &RademacherSpace, mut values: Vec<f64>) -> Self {
        assert_eq!(values.len(), 1usize << space.len());
        forward_transform(space, &mut values);
        Self {
            space: space.clone(),
            coefficients: values,
        }
    }

    pub fn from_coefficients(space: &RademacherSpace, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() != 1usize << space.len() {
            return Err(Error::Validation(format!(
                "expected 2^{} coefficients, got {}",
                space.len(),
                coefficients.len()
            )));
        }
        Ok(Self {
            space: space.clone(),
            coefficients,
        })
    }

    pub fn zero(space: &RademacherSpace) -> Self {
        Self {
            space: space.clone(),
            coefficients: vec![0.0; 1 << space.len()],
        }
    }

    pub fn space(&self) -> &RademacherSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn coefficient(&self, set: &[usize]) -> f64 {
        self.coefficients[mask_of(set)]
    }

    pub fn mean(&self) -> f64 {
        self.coefficients[0]
    }

    /// `f_m(i_1,…,i_m) = c_{i_1,…,i_m} / m!` off the diagonals, zero on them.
    pub fn kernel(&self, indices: &[usize]) -> f64 {
        let mut mask = 0usize;
        for &k in indices {
            if k >= self.len() || mask & (1 << k) != 0 {
                return 0.0;
            }
            mask |= 1 << k;
        }
        self.coefficients[mask] / factorial(indices.len() as u64)
    }

    /// `Σ_A c_A ∏_{k∈A} Y_k(ω)`, folding one coordinate at a time.
    pub fn reconstruct(&self, omega: &Configuration) -> f64 {
        let n = self.len();
        let mut buf = self.coefficients.clone();
        for k in (0..n).rev() {
            let half = 1usize << k;
            let y = self.space.y(k, omega.is_plus(k));
            for m in 0..half {
                buf[m] += buf[m + half] * y;
            }
        }
        buf[0]
    }

    /// Values at every configuration (inverse transform).
    pub fn values(&self) -> Vec<f64> {
        let mut v = self.coefficients.clone();
        inverse_transform(&self.space, &mut v);
        v
    }

    /// `E[F²] = Σ_A c_A²`.
    pub fn second_moment(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum()
    }

    fn map_by_order(&self, g: impl Fn(u32) -> f64) -> Self {
        let coefficients = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(m, c)| c * g(m.count_ones()))
            .collect();
        Self {
            space: self.space.clone(),
            coefficients,
        }
    }

    /// `L`: multiplies the order-`m` part by `−m`.
    pub fn apply_l(&self) -> Self {
        self.map_by_order(|m| -(m as f64))
    }

    /// Pseudo-inverse `L^{-1}`: order `m ≥ 1` by `−1/m`, the mean is dropped.
    pub fn apply_l_inverse(&self) -> Self {
        self.map_by_order(|m| if m == 0 { 0.0 } else { -1.0 / m as f64 })
    }

    /// Strict `L^{-1}` that refuses non-centered input.
    pub fn apply_l_inverse_centered(&self) -> Result<Self> {
        if self.mean().abs() >= 1e-12 {
            return Err(Error::Validation(format!(
                "L^-1 needs a centered functional, mean is {:e}",
                self.mean()
            )));
        }
        Ok(self.apply_l_inverse())
    }

    /// `P_t`: order `m` by `e^{−mt}`.
    pub fn apply_semigroup(&self, t: f64) -> Result<Self> {
        if !(t >= 0.0) {
            return Err(Error::Validation(format!("semigroup time must be ≥ 0, got {t}")));
        }
        Ok(self.map_by_order(|m| (-(m as f64) * t).exp()))
    }

    /// Chaos expansion of `D_k F`: the coefficient at `B ∌ k` is `c_{B∪{k}}`.
    pub fn gradient(&self, k: usize) -> Result<Self> {
        self.space.check_index(k)?;
        let b = 1usize << k;
        let coefficients = (0..self.coefficients.len())
            .map(|m| if m & b == 0 { self.coefficients[m | b] } else { 0.0 })
            .collect();
        Ok(Self {
            space: self.space.clone(),
            coefficients,
        })
    }

    pub fn gradients(&self) -> Vec<Self> {
        (0..self.len())
            .map(|k| self.gradient(k).expect("index in range"))
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let coefficients = self
            .coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            space: self.space.clone(),
            coefficients,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_by_order(|_| s)
    }
}

fn mask_of(set: &[usize]) -> usize {
    set.iter().fold(0usize, |m, &k| m | (1 << k))
}

/// Divergence `δ(u)` of a process `u = (u_k)`.
///
/// Writing `u_k = Σ_B c^{(k)}_B Y_B`, the symmetrized off-diagonal kernels give
/// `δ(u) = Σ_A (Σ_{k∈A} c^{(k)}_{A∖{k}}) Y_A`.
pub fn divergence(u: &[ChaosDecomposition]) -> Result<ChaosDecomposition> {
    let first = u
        .first()
        .ok_or_else(|| Error::Validation("divergence of an empty process".into()))?;
    let space = first.space();
    let n = space.len();
    if u.len() > n || u.iter().any(|c| c.len() != n) {
        return Err(Error::Validation(
            "every component of u must live on the same space, one per coordinate".into(),
        ));
    }
    let mut out = vec![0.0; 1 << n];
    for (k, uk) in u.iter().enumerate() {
        let b = 1usize << k;
        for (m, o) in out.iter_mut().enumerate() {
            if m & b != 0 {
                *o += uk.coefficients[m & !b];
            }
        }
    }
    ChaosDecomposition::from_coefficients(space, out)
}

impl Functional for ChaosDecomposition {
    fn evaluate(&self, omega: &Configuration) -> f64 {
        self.reconstruct(omega)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::malliavin::{all_configurations, Constant, Polynomial, TableFunctional};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Direct definition `c_A = Σ_ω P(ω) F(ω) Y_A(ω)`, O(4^n).
    fn direct_coefficients<F: Functional>(f: &F, s: &RademacherSpace) -> Vec<f64> {
        let n = s.len();
        (0..1usize << n)
            .map(|a| {
                all_configurations(n)
                    .map(|w| {
                        let ya: f64 = (0..n)
                            .filter(|k| a & (1 << k) != 0)
                            .map(|k| s.standardized_value(&w, k).unwrap())
                            .product();
                        s.weight(&w) * f.evaluate(&w) * ya
                    })
                    .sum()
            })
            .collect()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn fast_transform_matches_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = RademacherSpace::new(vec![0.15, 0.5, 0.62, 0.9, 0.33]).unwrap();
        let f = TableFunctional::random(5, &mut rng);
        let fast = walsh_expand(&f, &s).unwrap();
        let direct = direct_coefficients(&f, &s);
        for (a, b) in fast.coefficients().iter().zip(&direct) {
            assert!(close(*a, *b));
        }
    }

    #[test]
    fn expansion_examples() {
        let s = RademacherSpace::homogeneous(2, 0.3).unwrap();
        let y1 = Polynomial::monomial(&s, &[0]).unwrap();
        let c = walsh_expand(&y1, &s).unwrap();
        assert!(close(c.coefficient(&[0]), 1.0));
        assert!(close(c.coefficient(&[]), 0.0) && close(c.coefficient(&[0, 1]), 0.0));

        let s = RademacherSpace::new(vec![0.25]).unwrap();
        let x1 = crate::malliavin::from_fn(|w: &Configuration| w.sign(0));
        let c = walsh_expand(&x1, &s).unwrap();
        assert!(close(c.mean(), -0.5));
        assert!(close(c.coefficient(&[0]), 3f64.sqrt() / 2.0));
        for w in all_configurations(1) {
            assert!(close(c.reconstruct(&w), w.sign(0)));
        }

        let s = RademacherSpace::homogeneous(3, 0.4).unwrap();
        let c = walsh_expand(&Polynomial::monomial(&s, &[0, 1]).unwrap(), &s).unwrap();
        assert!(close(c.coefficient(&[0, 1]), 1.0));
        assert!(close(c.kernel(&[0, 1]), 0.5) && close(c.kernel(&[1, 0]), 0.5));
        assert_eq!(c.kernel(&[1, 1]), 0.0);
        assert!(close(c.second_moment(), 1.0));
    }

    #[test]
    fn reconstruct_examples() {
        let s = RademacherSpace::homogeneous(3, 0.2).unwrap();
        let c = walsh_expand(&Constant(3.5), &s).unwrap();
        for w in all_configurations(3) {
            assert!(close(c.reconstruct(&w), 3.5));
        }
        let s = RademacherSpace::homogeneous(2, 0.5).unwrap();
        let mut coeffs = vec![0.0; 4];
        coeffs[3] = 1.0;
        let c = ChaosDecomposition::from_coefficients(&s, coeffs).unwrap();
        assert!(close(c.reconstruct(&Configuration::all_plus(2)), 1.0));
    }

    #[test]
    fn operators() {
        let s = RademacherSpace::homogeneous(2, 0.5).unwrap();
        let c = walsh_expand(&Polynomial::monomial(&s, &[0, 1]).unwrap(), &s).unwrap();
        assert!(close(c.apply_l().coefficient(&[0, 1]), -2.0));
        let y1 = walsh_expand(&Polynomial::monomial(&s, &[0]).unwrap(), &s).unwrap();
        assert!(close(y1.apply_semigroup(0.7).unwrap().coefficient(&[0]), (-0.7f64).exp()));
        assert!(y1.apply_semigroup(-1.0).is_err());
        let with_mean = walsh_expand(&Constant(1.0), &s).unwrap();
        assert!(with_mean.apply_l_inverse_centered().is_err());
        assert_eq!(with_mean.apply_l_inverse().mean(), 0.0);
    }

    #[test]
    fn divergence_examples() {
        let s = RademacherSpace::homogeneous(3, 0.5).unwrap();
        let f = walsh_expand(&Polynomial::monomial(&s, &[0, 1]).unwrap(), &s).unwrap();
        let d = divergence(&f.gradients()).unwrap();
        let minus_l = f.apply_l().scale(-1.0);
        for (a, b) in d.coefficients().iter().zip(minus_l.coefficients()) {
            assert!(close(*a, *b));
        }
        let zero = vec![ChaosDecomposition::zero(&s); 3];
        assert!(divergence(&zero).unwrap().coefficients().iter().all(|&c| c == 0.0));
        let mut u = vec![ChaosDecomposition::zero(&s); 3];
        u[0] = walsh_expand(&Constant(1.0), &s).unwrap();
        let d = divergence(&u).unwrap();
        assert!(close(d.coefficient(&[0]), 1.0));
        assert!(d.coefficients().iter().enumerate().all(|(m, c)| m == 1 || *c == 0.0));
    }
}
