use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::malliavin::{Configuration, RademacherSpace};
use crate::{Error, Result};

/// Ornstein–Uhlenbeck process started at a fixed configuration.
///
/// Each coordinate carries an exponential clock `Z_k` of mean one and an
/// independent copy `X_k^*`; at time `t` the coordinate reads `X_k^*` if
/// `Z_k ≤ t` and keeps `ω_k` otherwise.
#[derive(Clone, Debug)]
pub struct OUProcessSampler {
    space: RademacherSpace,
    base: Configuration,
    t: f64,
}

impl OUProcessSampler {
    pub fn new(space: &RademacherSpace, base: Configuration, t: f64) -> Result<Self> {
        space.check_configuration(&base)?;
        if !(t >= 0.0) {
            return Err(Error::Validation(format!("time must be ≥ 0, got {t}")));
        }
        Ok(Self {
            space: space.clone(),
            base,
            t,
        })
    }

    pub fn base(&self) -> &Configuration {
        &self.base
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Configuration {
        let mut out = self.base.clone();
        for k in 0..self.space.len() {
            let z: f64 = Exp1.sample(rng);
            if z <= self.t {
                out.set(k, rng.random::<f64>() < self.space.p(k));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn time_zero_is_identity() {
        let s = RademacherSpace::homogeneous(6, 0.3).unwrap();
        let base = Configuration::from_signs(&[1, -1, 1, 1, -1, -1]).unwrap();
        let ou = OUProcessSampler::new(&s, base.clone(), 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(ou.sample(&mut rng), base);
        }
        assert!(OUProcessSampler::new(&s, base, f64::NAN).is_err());
    }

    #[test]
    fn resampling_probability() {
        // P(X_k^t = +1 | ω_k = −1) = (1 − e^{−t}) p.
        let s = RademacherSpace::homogeneous(1, 0.4).unwrap();
        let ou = OUProcessSampler::new(&s, Configuration::all_minus(1), 0.8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let reps = 100_000;
        let hits = (0..reps).filter(|_| ou.sample(&mut rng).is_plus(0)).count();
        let expected = (1.0 - (-0.8f64).exp()) * 0.4;
        let se = (expected * (1.0 - expected) / reps as f64).sqrt();
        assert!((hits as f64 / reps as f64 - expected).abs() < 4.0 * se);
    }
}
