use std::f64::consts::FRAC_PI_4;

use rand_chacha::ChaCha8Rng;

use super::GaussianTarget;
use crate::smooth::Cosine;
use crate::util::{chunked, Accumulator, DEFAULT_CHUNK};
use crate::{Error, Result};

/// 32 cosine test functions: 8 sign patterns × magnitudes {1, ½} × phases {0, π/4}.
///
/// Pattern `r` gives coordinate `j` the sign `(−1)^{bit (j mod 3) of r}`.
pub fn default_family(d: usize) -> Vec<Cosine> {
    let mut out = Vec::with_capacity(32);
    for r in 0..8u32 {
        let signs: Vec<f64> = (0..d)
            .map(|j| if (r >> (j % 3)) & 1 == 1 { -1.0 } else { 1.0 })
            .collect();
        for mag in [1.0, 0.5] {
            for b in [0.0, FRAC_PI_4] {
                out.push(Cosine::new(signs.iter().map(|s| s * mag).collect(), b));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurrogateRow {
    pub a: Vec<f64>,
    pub b: f64,
    pub estimate: f64,
    pub gaussian: f64,
    pub std_error: f64,
}

impl SurrogateRow {
    pub fn discrepancy(&self) -> f64 {
        (self.estimate - self.gaussian).abs()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurrogateResult {
    pub max_discrepancy: f64,
    /// Standard error of the member attaining the maximum.
    pub std_error: f64,
    pub samples: u64,
    pub table: Vec<SurrogateRow>,
}

impl SurrogateResult {
    /// `max discrepancy − 4·stderr`, a lower confidence value for `d_4`.
    pub fn lower_bound(&self) -> f64 {
        self.max_discrepancy - 4.0 * self.std_error
    }
}

/// Largest `|E g(F) − E g(N)|` over the cosine family, with `E g(F)` from
/// `samples` draws of `sampler` and `E g(N)` in closed form.
///
/// All members share the same draws.
pub fn d4_surrogate<S>(
    sampler: S,
    target: &GaussianTarget,
    family: &[Cosine],
    samples: u64,
    seed: u64,
) -> Result<SurrogateResult>
where
    S: Fn(&mut ChaCha8Rng, &mut Vec<f64>) + Sync,
{
    let d = target.dim();
    for g in family {
        if g.a.len() != d {
            return Err(Error::Validation("family member has the wrong dimension".into()));
        }
        Cosine::bounded(g.a.clone(), g.b)?;
    }
    if samples < 2 {
        return Err(Error::Validation("at least two samples are required".into()));
    }
    let nf = family.len();
    let partial = chunked(samples, DEFAULT_CHUNK, seed, |rng, count| {
        let mut accs = vec![Accumulator::default(); nf];
        let mut x = vec![0.0; d];
        for _ in 0..count {
            sampler(rng, &mut x);
            for (acc, g) in accs.iter_mut().zip(family) {
                acc.push(g.phase(&x).cos());
            }
        }
        accs
    });
    let mut accs = vec![Accumulator::default(); nf];
    for p in &partial {
        for (a, b) in accs.iter_mut().zip(p) {
            a.merge(b);
        }
    }
    let table: Vec<SurrogateRow> = family
        .iter()
        .zip(&accs)
        .map(|(g, acc)| SurrogateRow {
            a: g.a.clone(),
            b: g.b,
            estimate: acc.mean,
            gaussian: target.expected_cosine(g),
            std_error: acc.std_error(),
        })
        .collect();
    let best = table
        .iter()
        .max_by(|x, y| x.discrepancy().total_cmp(&y.discrepancy()));
    let (max_discrepancy, std_error) =
        best.map_or((0.0, 0.0), |r| (r.discrepancy(), r.std_error));
    Ok(SurrogateResult {
        max_discrepancy,
        std_error,
        samples,
        table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn family_shape() {
        let f = default_family(3);
        assert_eq!(f.len(), 32);
        assert!(f.iter().all(|g| g.a.iter().all(|a| a.abs() <= 1.0)));
        let mut dirs: Vec<String> = f.iter().map(|g| format!("{:?}", g.a)).collect();
        dirs.sort();
        dirs.dedup();
        assert_eq!(dirs.len(), 16);
    }

    #[test]
    fn zero_direction_has_no_discrepancy() {
        let t = GaussianTarget::identity(2);
        let r = d4_surrogate(
            |rng, x| x.copy_from_slice(&t.sample(rng)),
            &t,
            &[Cosine::new(vec![0.0, 0.0], 0.0)],
            100,
            1,
        )
        .unwrap();
        assert_eq!(r.max_discrepancy, 0.0);
    }

    #[test]
    fn gaussian_samples_are_consistent() {
        let sigma = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 0.5]);
        let t = GaussianTarget::new(sigma).unwrap();
        let fam = default_family(2);
        let r = d4_surrogate(|rng, x| x.copy_from_slice(&t.sample(rng)), &t, &fam, 100_000, 5)
            .unwrap();
        for row in &r.table {
            assert!(row.discrepancy() <= 4.0 * row.std_error + 1e-12);
        }
    }

    #[test]
    fn rejects_large_directions() {
        let t = GaussianTarget::identity(1);
        let err = d4_surrogate(|_, _| {}, &t, &[Cosine::new(vec![2.0], 0.0)], 10, 0);
        assert!(matches!(err, Err(Error::Validation(_))));
    }
}
