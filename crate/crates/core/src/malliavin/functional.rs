use std::sync::Arc;

use rand::Rng;

use super::{Configuration, RademacherSpace};
use crate::{Error, Result};

/// A real-valued function of a configuration.
///
/// Implementations must be deterministic. A declared [`support`](Self::support)
/// must contain every coordinate whose flip can change the value, and
/// [`second_derivative_support`](Self::second_derivative_support) every `ℓ`
/// for which `D_k D_ℓ F` can be nonzero.
pub trait Functional: Send + Sync {
    fn evaluate(&self, omega: &Configuration) -> f64;

    /// `F(ω_+^k) − F(ω_−^k)`. Override when a local formula is available.
    fn flip_difference(&self, omega: &Configuration, k: usize) -> f64 {
        let mut w = omega.clone();
        w.set(k, true);
        let plus = self.evaluate(&w);
        w.set(k, false);
        plus - self.evaluate(&w)
    }

    fn support(&self) -> Option<Vec<usize>> {
        None
    }

    /// Coordinates `ℓ ≠ k` with possibly nonzero `D_k D_ℓ F`; `None` means all.
    fn second_derivative_support(&self, _k: usize) -> Option<Vec<usize>> {
        None
    }
}

impl<T: Functional + ?Sized> Functional for &T {
    fn evaluate(&self, omega: &Configuration) -> f64 {
        (**self).evaluate(omega)
    }
    fn flip_difference(&self, omega: &Configuration, k: usize) -> f64 {
        (**self).flip_difference(omega, k)
    }
    fn support(&self) -> Option<Vec<usize>> {
        (**self).support()
    }
    fn second_derivative_support(&self, k: usize) -> Option<Vec<usize>> {
        (**self).second_derivative_support(k)
    }
}

impl<T: Functional + ?Sized> Functional for Box<T> {
    fn evaluate(&self, omega: &Configuration) -> f64 {
        (**self).evaluate(omega)
    }
    fn flip_difference(&self, omega: &Configuration, k: usize) -> f64 {
        (**self).flip_difference(omega, k)
    }
    fn support(&self) -> Option<Vec<usize>> {
        (**self).support()
    }
    fn second_derivative_support(&self, k: usize) -> Option<Vec<usize>> {
        (**self).second_derivative_support(k)
    }
}

impl<T: Functional + ?Sized> Functional for Arc<T> {
    fn evaluate(&self, omega: &Configuration) -> f64 {
        (**self).evaluate(omega)
    }
    fn flip_difference(&self, omega: &Configuration, k: usize) -> f64 {
        (**self).flip_difference(omega, k)
    }
    fn support(&self) -> Option<Vec<usize>> {
        (**self).support()
    }
    fn second_derivative_support(&self, k: usize) -> Option<Vec<usize>> {
        (**self).second_derivative_support(k)
    }
}

/// Wraps a closure, optionally with a declared support.
pub struct FnFunctional<F> {
    f: F,
    support: Option<Vec<usize>>,
}

pub fn from_fn<F>(f: F) -> FnFunctional<F>
where
    F: Fn(&Configuration) -> f64 + Send + Sync,
{
    FnFunctional { f, support: None }
}

impl<F> FnFunctional<F> {
    pub fn with_support(mut self, support: Vec<usize>) -> Self {
        self.support = Some(support);
        self
    }
}

impl<F> Functional for FnFunctional<F>
where
    F: Fn(&Configuration) -> f64 + Send + Sync,
{
    fn evaluate(&self, omega: &Configuration) -> f64 {
        (self.f)(omega)
    }
    fn support(&self) -> Option<Vec<usize>> {
        self.support.clone()
    }
    fn second_derivative_support(&self, k: usize) -> Option<Vec<usize>> {
        let s = self.support.as_ref()?;
        Some(if s.contains(&k) {
            s.iter().copied().filter(|&l| l != k).collect()
        } else {
            Vec::new()
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Constant(pub f64);

impl Functional for Constant {
    fn evaluate(&self, _omega: &Configuration) -> f64 {
        self.0
    }
    fn flip_difference(&self, _omega: &Configuration, _k: usize) -> f64 {
        0.0
    }
    fn support(&self) -> Option<Vec<usize>> {
        Some(Vec::new())
    }
    fn second_derivative_support(&self, _k: usize) -> Option<Vec<usize>> {
        Some(Vec::new())
    }
}

/// Pointwise product `F·G`.
pub struct Product<A, B>(pub A, pub B);

impl<A: Functional, B: Functional> Functional for Product<A, B> {
    fn evaluate(&self, omega: &Configuration) -> f64 {
        self.0.evaluate(omega) * self.1.evaluate(omega)
    }
}

/// Pointwise affine map `a·F + b`.
pub struct Affine<A> {
    pub inner: A,
    pub scale: f64,
    pub shift: f64,
}

impl<A: Functional> Functional for Affine<A> {
    fn evaluate(&self, omega: &Configuration) -> f64 {
        self.scale * self.inner.evaluate(omega) + self.shift
    }
    fn flip_difference(&self, omega: &Configuration, k: usize) -> f64 {
        self.scale * self.inner.flip_difference(omega, k)
    }
    fn support(&self) -> Option<Vec<usize>> {
        self.inner.support()
    }
    fn second_derivative_support(&self, k: usize) -> Option<Vec<usize>> {
        self.inner.second_derivative_support(k)
    }
}

/// Multilinear polynomial `Σ_t c_t ∏_{k∈A_t} Y_k` in the standardized variables.
#[derive(Clone, Debug)]
pub struct Polynomial {
    terms: Vec<(f64, Vec<usize>)>,
    y_plus: Vec<f64>,
    y_minus: Vec<f64>,
}

impl Polynomial {
    /// Repeated indices within a term are rejected since `Y_k²` is not multilinear.
    pub fn new(space: &RademacherSpace, terms: Vec<(f64, Vec<usize>)>) -> Result<Self> {
        for (_, set) in &terms {
            for (i, &k) in set.iter().enumerate() {
                space.check_index(k)?;
                if set[..i].contains(&k) {
                    return Err(Error::Validation(format!("index {k} repeated in a monomial")));
                }
            }
        }
        let n = space.len();
        Ok(Self {
            terms,
            y_plus: (0..n).map(|k| space.y(k, true)).collect(),
            y_minus: (0..n).map(|k| space.y(k, false)).collect(),
        })
    }

    /// The single monomial `∏_{k∈set} Y_k`.
    pub fn monomial(space: &RademacherSpace, set: &[usize]) -> Result<Self> {
        Self::new(space, vec![(1.0, set.to_vec())])
    }

    /// Random polynomial with `terms` monomials of degree at most `max_degree`
    /// and standard-normal-ish coefficients in [−1, 1].
    pub fn random<R: Rng + ?Sized>(
        space: &RademacherSpace,
        rng: &mut R,
        max_degree: usize,
        terms: usize,
    ) -> Self {
        let n = space.len();
        let max_degree = max_degree.min(n);
        let mut out = Vec::with_capacity(terms);
        for _ in 0..terms {
            let deg = rng.random_range(0..=max_degree);
            let mut idx: Vec<usize> = rand::seq::index::sample(rng, n, deg).into_vec();
            idx.sort_unstable();
            out.push((rng.random_range(-1.0..1.0), idx));
        }
        Self::new(space, out).expect("indices drawn without replacement")
    }

    pub fn terms(&self) -> &[(f64, Vec<usize>)] {
        &self.terms
    }

    fn y(&self, omega: &Configuration, k: usize) -> f64 {
        if omega.is_plus(k) {
            self.y_plus[k]
        } else {
            self.y_minus[k]
        }
    }
}

impl Functional for Polynomial {
    fn evaluate(&self, omega: &Configuration) -> f64 {
        self.terms
            .iter()
            .map(|(c, set)| c * set.iter().map(|&k| self.y(omega, k)).product::<f64>())
            .sum()
    }

    fn support(&self) -> Option<Vec<usize>> {
        let mut s: Vec<usize> = self.terms.iter().flat_map(|(_, t)| t.iter().copied()).collect();
        s.sort_unstable();
        s.dedup();
        Some(s)
    }

    fn second_derivative_support(&self, k: usize) -> Option<Vec<usize>> {
        let mut s: Vec<usize> = self
            .terms
            .iter()
            .filter(|(_, t)| t.contains(&k))
            .flat_map(|(_, t)| t.iter().copied().filter(|&l| l != k))
            .collect();
        s.sort_unstable();
        s.dedup();
        Some(s)
    }
}

/// Arbitrary function on `{−1,+1}^n` stored as a table indexed by mask.
#[derive(Clone, Debug)]
pub struct TableFunctional {
    n: usize,
    values: Vec<f64>,
}

impl TableFunctional {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n >= 32 || values.len() != 1usize << n {
            return Err(Error::Validation(format!(
                "table of length {} does not match 2^{n}",
                values.len()
            )));
        }
        Ok(Self { n, values })
    }

    /// Uniform values in [−1, 1] at every configuration.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let values = (0..1usize << n).map(|_| rng.random_range(-1.0..1.0)).collect();
        Self { n, values }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl Functional for TableFunctional {
    fn evaluate(&self, omega: &Configuration) -> f64 {
        self.values[omega.to_mask() as usize]
    }

    fn flip_difference(&self, omega: &Configuration, k: usize) -> f64 {
        let m = omega.to_mask() as usize;
        self.values[m | (1 << k)] - self.values[m & !(1 << k)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::malliavin::all_configurations;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn polynomial_support_oracles() {
        let s = RademacherSpace::homogeneous(5, 0.3).unwrap();
        let p = Polynomial::new(&s, vec![(1.0, vec![0, 2]), (0.5, vec![2, 3, 4]), (2.0, vec![])])
            .unwrap();
        assert_eq!(p.support().unwrap(), vec![0, 2, 3, 4]);
        assert_eq!(p.second_derivative_support(2).unwrap(), vec![0, 3, 4]);
        assert_eq!(p.second_derivative_support(1).unwrap(), Vec::<usize>::new());
        assert!(Polynomial::new(&s, vec![(1.0, vec![1, 1])]).is_err());
    }

    #[test]
    fn table_flip_matches_default() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = TableFunctional::random(4, &mut rng);
        struct Plain<'a>(&'a TableFunctional);
        impl Functional for Plain<'_> {
            fn evaluate(&self, w: &Configuration) -> f64 {
                self.0.evaluate(w)
            }
        }
        for w in all_configurations(4) {
            for k in 0..4 {
                assert_eq!(t.flip_difference(&w, k), Plain(&t).flip_difference(&w, k));
            }
        }
    }
}
