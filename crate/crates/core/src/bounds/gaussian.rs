use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::smooth::Cosine;
use crate::util::{chunked, Accumulator, DEFAULT_CHUNK};
use crate::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;
const CLAMP_TOL: f64 = 1e-10;

/// `S = V diag(sqrt(λ))` with eigenvalues below `1e-10` clamped to zero, so
/// that `S Sᵀ = Σ` also for rank-deficient `Σ`.
pub fn psd_factor(sigma: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !sigma.is_square() {
        return Err(Error::Validation("covariance matrix is not square".into()));
    }
    let d = sigma.nrows();
    for i in 0..d {
        for j in 0..i {
            if (sigma[(i, j)] - sigma[(j, i)]).abs() > SYMMETRY_TOL {
                return Err(Error::Validation(format!(
                    "covariance matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    if d == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(sigma.clone());
    let min = eig.eigenvalues.min();
    if min < -CLAMP_TOL {
        return Err(Error::NotPsd(min));
    }
    let roots = eig
        .eigenvalues
        .map(|l| if l < CLAMP_TOL { 0.0 } else { l.sqrt() });
    Ok(eig.eigenvectors * DMatrix::from_diagonal(&roots))
}

/// Centered Gaussian `N(0, Σ)` with a sampling factor.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianTarget {
    sigma: DMatrix<f64>,
    factor: DMatrix<f64>,
}

impl GaussianTarget {
    pub fn new(sigma: DMatrix<f64>) -> Result<Self> {
        let factor = psd_factor(&sigma)?;
        Ok(Self { sigma, factor })
    }

    pub fn identity(d: usize) -> Self {
        Self::new(DMatrix::identity(d, d)).expect("identity is PSD")
    }

    /// `Σ = σσᵀ`.
    pub fn rank_one(sigma: &[f64]) -> Self {
        let v = DVector::from_column_slice(sigma);
        Self::new(&v * v.transpose()).expect("outer products are PSD")
    }

    pub fn dim(&self) -> usize {
        self.sigma.nrows()
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn factor(&self) -> &DMatrix<f64> {
        &self.factor
    }

    pub fn rank(&self) -> usize {
        (0..self.dim())
            .filter(|&c| self.factor.column(c).iter().any(|v| *v != 0.0))
            .count()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let d = self.dim();
        let z = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
        (&self.factor * z).iter().copied().collect()
    }

    /// `aᵀ Σ a`.
    pub fn quadratic_form(&self, a: &[f64]) -> f64 {
        let a = DVector::from_column_slice(a);
        (a.transpose() * &self.sigma * &a)[(0, 0)]
    }

    /// `E[cos(⟨a, N⟩ + b)] = cos(b) exp(−½ aᵀΣa)`.
    pub fn expected_cosine(&self, g: &Cosine) -> f64 {
        g.b.cos() * (-0.5 * self.quadratic_form(&g.a)).exp()
    }
}

/// One member/component comparison in [`gaussian_ibp_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct IbpRow {
    pub member: usize,
    pub component: usize,
    pub estimate: f64,
    pub exact: f64,
    pub std_error: f64,
}

impl IbpRow {
    pub fn z_score(&self) -> f64 {
        let diff = self.estimate - self.exact;
        if self.std_error > 0.0 {
            diff / self.std_error
        } else if diff.abs() < 1e-12 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IbpCheck {
    pub rows: Vec<IbpRow>,
}

impl IbpCheck {
    pub fn max_abs_z(&self) -> f64 {
        self.rows.iter().map(|r| r.z_score().abs()).fold(0.0, f64::max)
    }
}

/// Monte Carlo `E[N_i g(N)]` against `Σ_j Σ_ij E[∂_j g(N)]`, which for
/// `g = cos(⟨a,·⟩ + b)` equals `−sin(b) exp(−½ aᵀΣa) (Σa)_i`.
pub fn gaussian_ibp_check(
    target: &GaussianTarget,
    family: &[Cosine],
    samples: u64,
    seed: u64,
) -> Result<IbpCheck> {
    let d = target.dim();
    if family.iter().any(|g| g.a.len() != d) {
        return Err(Error::Validation("family member has the wrong dimension".into()));
    }
    if samples < 2 {
        return Err(Error::Validation("at least two samples are required".into()));
    }
    let nf = family.len();
    let partial = chunked(samples, DEFAULT_CHUNK, seed, |rng, count| {
        let mut accs = vec![Accumulator::default(); nf * d];
        for _ in 0..count {
            let x = target.sample(rng);
            for (f, g) in family.iter().enumerate() {
                let c = g.phase(&x).cos();
                for i in 0..d {
                    accs[f * d + i].push(x[i] * c);
                }
            }
        }
        accs
    });
    let mut accs = vec![Accumulator::default(); nf * d];
    for p in &partial {
        for (a, b) in accs.iter_mut().zip(p) {
            a.merge(b);
        }
    }
    let mut rows = Vec::with_capacity(nf * d);
    for (f, g) in family.iter().enumerate() {
        let a = DVector::from_column_slice(&g.a);
        let sa = target.covariance() * &a;
        let damp = (-0.5 * target.quadratic_form(&g.a)).exp();
        for i in 0..d {
            let acc = &accs[f * d + i];
            rows.push(IbpRow {
                member: f,
                component: i,
                estimate: acc.mean,
                exact: -g.b.sin() * damp * sa[i],
                std_error: acc.std_error(),
            });
        }
    }
    Ok(IbpCheck { rows })
}
