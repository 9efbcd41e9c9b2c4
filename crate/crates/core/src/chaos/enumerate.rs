use rayon::prelude::*;

use crate::malliavin::{Configuration, Functional, RademacherSpace};
use crate::{Error, Result};

/// Largest coordinate count for which exact operations enumerate `2^n` points.
pub const EXACT_LIMIT: usize = 20;

/// Exact expectations over all configurations of a small space.
///
/// Functions are represented as tables indexed by configuration mask.
#[derive(Clone, Debug)]
pub struct ExactEnumerator {
    space: RademacherSpace,
    weights: Vec<f64>,
}

impl ExactEnumerator {
    pub fn new(space: &RademacherSpace) -> Result<Self> {
        Self::with_limit(space, EXACT_LIMIT)
    }

    pub fn with_limit(space: &RademacherSpace, limit: usize) -> Result<Self> {
        let n = space.len();
        if n > limit.min(EXACT_LIMIT) {
            return Err(Error::Capacity(format!(
                "exact enumeration over {n} coordinates exceeds the limit of {}; \
                 use the Monte Carlo backend or a smaller n",
                limit.min(EXACT_LIMIT)
            )));
        }
        let mut weights = vec![1.0f64; 1 << n];
        for k in 0..n {
            let b = 1usize << k;
            for (m, w) in weights.iter_mut().enumerate() {
                *w *= if m & b != 0 { space.p(k) } else { space.q(k) };
            }
        }
        Ok(Self {
            space: space.clone(),
            weights,
        })
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

    pub fn size(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn configuration(&self, mask: usize) -> Configuration {
        Configuration::from_mask(self.len(), mask as u64)
    }

    /// Values of `f` at every configuration.
    pub fn tabulate<F: Functional + ?Sized>(&self, f: &F) -> Vec<f64> {
        let n = self.len();
        (0..self.size())
            .into_par_iter()
            .map(|m| f.evaluate(&Configuration::from_mask(n, m as u64)))
            .collect()
    }

    pub fn expect(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.size());
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    pub fn expect_with(&self, mut f: impl FnMut(usize) -> f64) -> f64 {
        self.weights.iter().enumerate().map(|(m, w)| w * f(m)).sum()
    }

    /// `D_k` applied to a table by the two-point definition.
    pub fn derivative(&self, values: &[f64], k: usize) -> Vec<f64> {
        let b = 1usize << k;
        let s = self.space.sqrt_pq(k);
        (0..values.len())
            .map(|m| s * (values[m | b] - values[m & !b]))
            .collect()
    }

    /// Iterated derivative `D_{k_m}(… D_{k_1} F)`.
    pub fn derivative_tuple(&self, values: &[f64], ks: &[usize]) -> Vec<f64> {
        ks.iter()
            .fold(values.to_vec(), |acc, &k| self.derivative(&acc, k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn capacity_is_enforced() {
        let s = RademacherSpace::homogeneous(21, 0.5).unwrap();
        assert!(ExactEnumerator::new(&s).unwrap_err().is_capacity());
        let s = RademacherSpace::homogeneous(6, 0.5).unwrap();
        assert!(ExactEnumerator::with_limit(&s, 5).is_err());
    }

    #[test]
    fn weights_match_space() {
        let s = RademacherSpace::new(vec![0.2, 0.7, 0.4]).unwrap();
        let e = ExactEnumerator::new(&s).unwrap();
        for m in 0..8 {
            assert!((e.weights()[m] - s.weight(&e.configuration(m))).abs() < 1e-16);
        }
    }
}
