use rand::Rng;
use rand_distr::{Distribution, Geometric};

use super::Configuration;
use crate::{Error, Result};

// Below this success probability a homogeneous space samples by geometric
// gaps between +1 coordinates instead of one draw per coordinate.
const SPARSE_SAMPLING_P: f64 = 0.05;

/// Finite product of two-point laws: `P(X_k = +1) = p_k`.
#[derive(Clone, Debug)]
pub struct RademacherSpace {
    p: Vec<f64>,
    q: Vec<f64>,
    sqrt_pq: Vec<f64>,
    thresholds: Vec<u64>,
    homogeneous: Option<f64>,
}

fn threshold(p: f64) -> u64 {
    // P(u < t) = p for u uniform on u64.
    (p * 18_446_744_073_709_551_616.0) as u64
}

impl RademacherSpace {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::Validation("a space needs at least one coordinate".into()));
        }
        if let Some((k, v)) = p.iter().enumerate().find(|(_, &v)| !(v > 0.0 && v < 1.0)) {
            return Err(Error::Validation(format!(
                "success probability p[{k}] = {v} is not strictly inside (0,1)"
            )));
        }
        let q: Vec<f64> = p.iter().map(|v| 1.0 - v).collect();
        let sqrt_pq = p.iter().zip(&q).map(|(a, b)| (a * b).sqrt()).collect();
        let thresholds = p.iter().map(|&v| threshold(v)).collect();
        let homogeneous = p.iter().all(|&v| v == p[0]).then_some(p[0]);
        Ok(Self {
            p,
            q,
            sqrt_pq,
            thresholds,
            homogeneous,
        })
    }

    pub fn homogeneous(n: usize, p: f64) -> Result<Self> {
        Self::new(vec![p; n])
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    #[inline]
    pub fn p(&self, k: usize) -> f64 {
        self.p[k]
    }

    #[inline]
    pub fn q(&self, k: usize) -> f64 {
        self.q[k]
    }

    #[inline]
    pub fn sqrt_pq(&self, k: usize) -> f64 {
        self.sqrt_pq[k]
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    /// The common success probability, if all coordinates share one.
    pub fn homogeneous_p(&self) -> Option<f64> {
        self.homogeneous
    }

    pub fn check_index(&self, k: usize) -> Result<()> {
        if k < self.len() {
            Ok(())
        } else {
            Err(Error::Index {
                index: k,
                len: self.len(),
            })
        }
    }

    pub fn check_configuration(&self, omega: &Configuration) -> Result<()> {
        if omega.len() == self.len() {
            Ok(())
        } else {
            Err(Error::Validation(format!(
                "configuration has {} coordinates, space has {}",
                omega.len(),
                self.len()
            )))
        }
    }

    /// `P({ω}) = ∏_k (p_k if ω_k = +1 else q_k)`.
    pub fn weight(&self, omega: &Configuration) -> f64 {
        (0..self.len())
            .map(|k| if omega.is_plus(k) { self.p[k] } else { self.q[k] })
            .product()
    }

    /// `Y_k(ω) = (ω_k − p_k + q_k) / (2 sqrt(p_k q_k))`.
    pub fn standardized_value(&self, omega: &Configuration, k: usize) -> Result<f64> {
        self.check_index(k)?;
        self.check_configuration(omega)?;
        Ok(self.y(k, omega.is_plus(k)))
    }

    /// `Y_k` at `ω_k = ±1` without bounds checks.
    #[inline]
    pub fn y(&self, k: usize, plus: bool) -> f64 {
        let x = if plus { 1.0 } else { -1.0 };
        (x - self.p[k] + self.q[k]) / (2.0 * self.sqrt_pq[k])
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Configuration {
        let mut omega = Configuration::all_minus(self.len());
        self.sample_into(rng, &mut omega);
        omega
    }

    /// Overwrites `omega` with a fresh draw from the product measure.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, omega: &mut Configuration) {
        debug_assert_eq!(omega.len(), self.len());
        match self.homogeneous {
            Some(p) if p < SPARSE_SAMPLING_P => {
                omega.clear();
                let geo = Geometric::new(p).expect("p in (0,1)");
                let n = self.len() as u64;
                let mut k = geo.sample(rng);
                while k < n {
                    omega.set(k as usize, true);
                    k = k.saturating_add(1).saturating_add(geo.sample(rng));
                }
            }
            Some(0.5) => {
                for w in omega.words_mut() {
                    *w = rng.random::<u64>();
                }
                omega.mask_tail();
            }
            Some(p) => {
                let t = threshold(p);
                let n = self.len();
                for (wi, w) in omega.words_mut().iter_mut().enumerate() {
                    let base = wi * 64;
                    let bits = (n - base).min(64);
                    let mut word = 0u64;
                    for b in 0..bits {
                        word |= ((rng.random::<u64>() < t) as u64) << b;
                    }
                    *w = word;
                }
            }
            None => {
                for (k, &t) in self.thresholds.iter().enumerate() {
                    omega.set(k, rng.random::<u64>() < t);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::all_configurations;
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_degenerate_probabilities() {
        assert!(RademacherSpace::new(vec![0.5, 1.0]).is_err());
        assert!(RademacherSpace::new(vec![0.0]).is_err());
        assert!(RademacherSpace::new(vec![f64::NAN]).is_err());
        assert!(RademacherSpace::new(vec![]).is_err());
    }

    #[test]
    fn weights_sum_to_one() {
        let s = RademacherSpace::new(vec![0.1, 0.35, 0.5, 0.8, 0.93]).unwrap();
        let total: f64 = all_configurations(5).map(|w| s.weight(&w)).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn standardized_values() {
        let s = RademacherSpace::new(vec![0.5, 0.25]).unwrap();
        let plus = Configuration::all_plus(2);
        let minus = Configuration::all_minus(2);
        assert_eq!(s.standardized_value(&plus, 0).unwrap(), 1.0);
        assert_eq!(s.standardized_value(&minus, 0).unwrap(), -1.0);
        let y = s.standardized_value(&plus, 1).unwrap();
        assert!((y - 1.7320508075688772).abs() < 1e-12);
        // Independent check: mean zero and unit variance under the weights.
        let ym = s.standardized_value(&minus, 1).unwrap();
        assert!((0.25 * y + 0.75 * ym).abs() < 1e-15);
        assert!((0.25 * y * y + 0.75 * ym * ym - 1.0).abs() < 1e-14);
        assert!(matches!(
            s.standardized_value(&plus, 2),
            Err(Error::Index { index: 2, len: 2 })
        ));
    }

    #[test]
    fn sampling_frequencies() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [0.01, 0.3] {
            let s = RademacherSpace::homogeneous(200, p).unwrap();
            let mut hits = 0usize;
            let reps = 2000;
            for _ in 0..reps {
                hits += s.sample(&mut rng).count_plus();
            }
            let n = (200 * reps) as f64;
            let se = (p * (1.0 - p) / n).sqrt();
            assert!((hits as f64 / n - p).abs() < 5.0 * se, "p={p}");
        }
        let s = RademacherSpace::new(vec![0.2, 0.9]).unwrap();
        let mut c = [0usize; 2];
        for _ in 0..20000 {
            let w = s.sample(&mut rng);
            c[0] += w.is_plus(0) as usize;
            c[1] += w.is_plus(1) as usize;
        }
        assert!((c[0] as f64 / 20000.0 - 0.2).abs() < 0.015);
        assert!((c[1] as f64 / 20000.0 - 0.9).abs() < 0.01);
    }
}
