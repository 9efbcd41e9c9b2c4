use rayon::prelude::*;

use super::MomentEstimate;
use crate::chaos::ExactEnumerator;
use crate::malliavin::{
    first_derivative_unchecked, second_derivative_mut, Configuration, Functional, RademacherSpace,
};
use crate::util::{chunked, Accumulator, DEFAULT_CHUNK};
use crate::{Error, Result};

/// Coordinate count up to which [`MomentBackend::Auto`] enumerates exactly.
pub const AUTO_EXACT_LIMIT: usize = 14;
pub const DEFAULT_SAMPLES: u64 = 100_000;

/// How expectations of derivative products are computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MomentBackend {
    Exact,
    MonteCarlo { samples: u64, seed: u64, chunk: u64 },
    /// Exact when `n ≤ 14`, Monte Carlo otherwise.
    Auto { samples: u64, seed: u64, chunk: u64 },
}

impl Default for MomentBackend {
    fn default() -> Self {
        Self::auto(DEFAULT_SAMPLES, 0)
    }
}

impl MomentBackend {
    pub fn monte_carlo(samples: u64, seed: u64) -> Self {
        Self::MonteCarlo {
            samples,
            seed,
            chunk: DEFAULT_CHUNK,
        }
    }

    pub fn auto(samples: u64, seed: u64) -> Self {
        Self::Auto {
            samples,
            seed,
            chunk: DEFAULT_CHUNK,
        }
    }

    /// The concrete backend used on a space with `n` coordinates.
    pub fn resolve(self, n: usize) -> Self {
        match self {
            Self::Auto {
                samples,
                seed,
                chunk,
            } => {
                if n <= AUTO_EXACT_LIMIT {
                    Self::Exact
                } else {
                    Self::MonteCarlo {
                        samples,
                        seed,
                        chunk,
                    }
                }
            }
            other => other,
        }
    }

    pub fn samples(&self) -> u64 {
        match self {
            Self::Exact => 0,
            Self::MonteCarlo { samples, .. } | Self::Auto { samples, .. } => *samples,
        }
    }
}

/// One factor of a derivative product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Factor {
    /// `F_i(ω)`.
    Value,
    /// `D_k F_i(ω)`.
    First(usize),
    /// `D_ℓ D_k F_i(ω)` for `Second(k, ℓ)`.
    Second(usize, usize),
}

/// `E[∏ (factor_t of F_{i_t})^{power_t}]`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MomentExpr {
    pub factors: Vec<(usize, Factor, i32)>,
}

impl MomentExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn times(mut self, functional: usize, factor: Factor, power: i32) -> Self {
        self.factors.push((functional, factor, power));
        self
    }
}

/// Evaluates many derivative products per configuration and averages them.
///
/// Each quantity is described by a closure over a per-sample cache; the
/// engine only deals with the sampling, weighting and merging.
pub(crate) struct Plan {
    pub firsts: Vec<usize>,
    pub seconds: Vec<(usize, usize)>,
    pub value_needed: bool,
}

/// Per-configuration derivative cache, indexed `[slot][functional]`.
pub(crate) struct Cache {
    pub values: Vec<f64>,
    pub first: Vec<Vec<f64>>,
    pub second: Vec<Vec<f64>>,
}

impl Plan {
    fn fill<F: Functional>(
        &self,
        fs: &[F],
        space: &RademacherSpace,
        omega: &mut Configuration,
        cache: &mut Cache,
    ) {
        if self.value_needed {
            for (i, f) in fs.iter().enumerate() {
                cache.values[i] = f.evaluate(omega);
            }
        }
        for (slot, &k) in self.firsts.iter().enumerate() {
            for (i, f) in fs.iter().enumerate() {
                cache.first[slot][i] = first_derivative_unchecked(f, space, omega, k);
            }
        }
        for (slot, &(k, l)) in self.seconds.iter().enumerate() {
            for (i, f) in fs.iter().enumerate() {
                cache.second[slot][i] = second_derivative_mut(f, space, omega, k, l);
            }
        }
    }

    fn cache(&self, d: usize) -> Cache {
        Cache {
            values: vec![0.0; d],
            first: vec![vec![0.0; d]; self.firsts.len()],
            second: vec![vec![0.0; d]; self.seconds.len()],
        }
    }

    /// Means of `quantities` outputs (written into the provided buffer) under
    /// the chosen backend.
    pub fn run<F, Q>(
        &self,
        fs: &[F],
        space: &RademacherSpace,
        backend: MomentBackend,
        n_quantities: usize,
        quantities: Q,
    ) -> Result<Vec<MomentEstimate>>
    where
        F: Functional,
        Q: Fn(&Cache, &mut [f64]) + Sync,
    {
        let d = fs.len();
        let n = space.len();
        match backend.resolve(n) {
            MomentBackend::Exact => {
                let e = ExactEnumerator::new(space)?;
                let size = e.size();
                let block = 1usize << 10.min(n);
                let partial: Vec<Vec<f64>> = (0..size.div_ceil(block))
                    .into_par_iter()
                    .map(|b| {
                        let mut cache = self.cache(d);
                        let mut out = vec![0.0; n_quantities];
                        let mut sums = vec![0.0; n_quantities];
                        for m in b * block..((b + 1) * block).min(size) {
                            let mut omega = Configuration::from_mask(n, m as u64);
                            self.fill(fs, space, &mut omega, &mut cache);
                            quantities(&cache, &mut out);
                            let w = e.weights()[m];
                            for (s, o) in sums.iter_mut().zip(&out) {
                                *s += w * o;
                            }
                        }
                        sums
                    })
                    .collect();
                let mut total = vec![0.0; n_quantities];
                for p in &partial {
                    for (t, v) in total.iter_mut().zip(p) {
                        *t += v;
                    }
                }
                Ok(total.into_iter().map(MomentEstimate::exact).collect())
            }
            MomentBackend::MonteCarlo {
                samples,
                seed,
                chunk,
            } => {
                if samples < 2 {
                    return Err(Error::Validation(
                        "Monte Carlo needs at least two samples".into(),
                    ));
                }
                let partial = chunked(samples, chunk, seed, |rng, count| {
                    let mut cache = self.cache(d);
                    let mut out = vec![0.0; n_quantities];
                    let mut accs = vec![Accumulator::default(); n_quantities];
                    let mut omega = Configuration::all_minus(n);
                    for _ in 0..count {
                        space.sample_into(rng, &mut omega);
                        self.fill(fs, space, &mut omega, &mut cache);
                        quantities(&cache, &mut out);
                        for (a, o) in accs.iter_mut().zip(&out) {
                            a.push(*o);
                        }
                    }
                    accs
                });
                let mut accs = vec![Accumulator::default(); n_quantities];
                for p in &partial {
                    for (a, b) in accs.iter_mut().zip(p) {
                        a.merge(b);
                    }
                }
                Ok(accs
                    .iter()
                    .map(|a| MomentEstimate::monte_carlo(a.mean, a.std_error(), a.count))
                    .collect())
            }
            MomentBackend::Auto { .. } => unreachable!("resolved above"),
        }
    }
}

/// Estimates a single derivative-product moment.
pub fn estimate_moment<F: Functional>(
    fs: &[F],
    expr: &MomentExpr,
    space: &RademacherSpace,
    backend: MomentBackend,
) -> Result<MomentEstimate> {
    let mut firsts = Vec::new();
    let mut seconds = Vec::new();
    let mut value_needed = false;
    let mut slots = Vec::with_capacity(expr.factors.len());
    for &(i, factor, _) in &expr.factors {
        if i >= fs.len() {
            return Err(Error::Index {
                index: i,
                len: fs.len(),
            });
        }
        slots.push(match factor {
            Factor::Value => {
                value_needed = true;
                0
            }
            Factor::First(k) => {
                space.check_index(k)?;
                firsts.push(k);
                firsts.len() - 1
            }
            Factor::Second(k, l) => {
                space.check_index(k)?;
                space.check_index(l)?;
                seconds.push((k, l));
                seconds.len() - 1
            }
        });
    }
    let plan = Plan {
        firsts,
        seconds,
        value_needed,
    };
    let est = plan.run(fs, space, backend, 1, |cache, out| {
        out[0] = expr
            .factors
            .iter()
            .zip(&slots)
            .map(|(&(i, factor, power), &slot)| {
                let v = match factor {
                    Factor::Value => cache.values[i],
                    Factor::First(_) => cache.first[slot][i],
                    Factor::Second(..) => cache.second[slot][i],
                };
                v.powi(power)
            })
            .product();
    })?;
    Ok(est[0])
}
