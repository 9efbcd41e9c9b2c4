//! Small numeric helpers shared across modules.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Binomial coefficient as `f64`; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round_if_small()
}

/// Exact binomial coefficient for small arguments.
pub fn binomial_u64(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

pub fn factorial(n: u64) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

trait RoundIfSmall {
    fn round_if_small(self) -> Self;
}

impl RoundIfSmall for f64 {
    // Products of ratios drift by an ulp; integers below 2^53 are representable.
    fn round_if_small(self) -> Self {
        if self < 9.0e15 {
            self.round()
        } else {
            self
        }
    }
}

/// Numerically careful `x^a` for non-negative moments that may come out
/// slightly negative from Monte Carlo noise.
pub fn clamped_pow(x: f64, a: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x.powf(a)
    }
}

pub fn clamped_sqrt(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x.sqrt()
    }
}

/// Running mean and sum of squared deviations (Welford), mergeable.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Accumulator {
    pub count: u64,
    pub mean: f64,
    m2: f64,
}

impl Accumulator {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Accumulator) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / n;
        self.m2 += other.m2 + delta * delta * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

/// Default number of samples per independent random stream.
pub const DEFAULT_CHUNK: u64 = 4096;

/// Splits `samples` into chunks of `chunk` draws, runs `work(rng, count)` on
/// each chunk in parallel with a ChaCha stream derived from `(seed, chunk
/// index)`, and returns the per-chunk results in chunk order.
///
/// Results depend only on `(seed, samples, chunk)`, not on the thread count.
pub fn chunked<T, W>(samples: u64, chunk: u64, seed: u64, work: W) -> Vec<T>
where
    T: Send,
    W: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    let chunk = chunk.max(1);
    let chunks = samples.div_ceil(chunk);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let count = chunk.min(samples - c * chunk);
            work(&mut rng, count)
        })
        .collect()
}

/// Monte Carlo mean and standard error of a scalar statistic.
pub fn mc_mean<W>(samples: u64, chunk: u64, seed: u64, draw: W) -> Accumulator
where
    W: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    chunked(samples, chunk, seed, |rng, count| {
        let mut acc = Accumulator::default();
        for _ in 0..count {
            acc.push(draw(rng));
        }
        acc
    })
    .iter()
    .fold(Accumulator::default(), |mut a, b| {
        a.merge(b);
        a
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn accumulator_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 / 7.0).collect();
        let mut all = Accumulator::default();
        xs.iter().for_each(|&x| all.push(x));
        let mut merged = Accumulator::default();
        for part in xs.chunks(77) {
            let mut a = Accumulator::default();
            part.iter().for_each(|&x| a.push(x));
            merged.merge(&a);
        }
        assert_eq!(merged.count, all.count);
        assert!((merged.mean - all.mean).abs() < 1e-12);
        assert!((merged.variance() - all.variance()).abs() < 1e-9);
    }

    #[test]
    fn chunked_is_thread_independent() {
        let run = || mc_mean(10_000, 333, 9, |rng| rng.random::<f64>());
        let a = run();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(run);
        assert_eq!(a, b);
        assert!((a.mean - 0.5).abs() < 4.0 * a.std_error());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(3, 5), 0.0);
        assert_eq!(binomial_u64(128, 2), 8128);
        assert_eq!(binomial(0, 0), 1.0);
        assert_eq!(factorial(5), 120.0);
    }
}
