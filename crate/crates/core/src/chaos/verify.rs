use super::{divergence, ChaosDecomposition, ExactEnumerator, OUProcessSampler};
use crate::malliavin::{Functional, RademacherSpace};
use crate::smooth::SmoothTestFunction;
use crate::util::{mc_mean, DEFAULT_CHUNK};
use crate::{Error, Result};

/// Both sides of an exact identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl IdentityCheck {
    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

/// `E[F δ(u)]` against `E[⟨DF, u⟩]`, both by enumeration.
///
/// `δ(u)` is built from the chaos expansions of the `u_k`; `D_kF` uses the
/// two-point definition on the value table.
pub fn verify_adjoint<F, U>(f: &F, u: &[U], space: &RademacherSpace) -> Result<IdentityCheck>
where
    F: Functional + ?Sized,
    U: Functional,
{
    let e = ExactEnumerator::new(space)?;
    if u.len() != space.len() {
        return Err(Error::Validation(format!(
            "u has {} components, the space has {} coordinates",
            u.len(),
            space.len()
        )));
    }
    let fv = e.tabulate(f);
    let u_tables: Vec<Vec<f64>> = u.iter().map(|uk| e.tabulate(uk)).collect();
    let u_chaos: Vec<ChaosDecomposition> = u_tables
        .iter()
        .map(|t| ChaosDecomposition::from_values(space, t.clone()))
        .collect();
    let delta = divergence(&u_chaos)?.values();
    let lhs = e.expect_with(|m| fv[m] * delta[m]);
    let mut rhs = 0.0;
    for (k, uk) in u_tables.iter().enumerate() {
        let dk = e.derivative(&fv, k);
        rhs += e.expect_with(|m| dk[m] * uk[m]);
    }
    Ok(IdentityCheck { lhs, rhs })
}

/// `E[(F − EF) G]` against `E[⟨−DL^{-1}(F − EF), DG⟩]`.
pub fn verify_ibp<F, G>(f: &F, g: &G, space: &RademacherSpace) -> Result<IdentityCheck>
where
    F: Functional + ?Sized,
    G: Functional + ?Sized,
{
    let e = ExactEnumerator::new(space)?;
    let fv = e.tabulate(f);
    let gv = e.tabulate(g);
    let mean = e.expect(&fv);
    let lhs = e.expect_with(|m| (fv[m] - mean) * gv[m]);
    let centered: Vec<f64> = fv.iter().map(|v| v - mean).collect();
    let l_inv = ChaosDecomposition::from_values(space, centered)
        .apply_l_inverse()
        .values();
    let mut rhs = 0.0;
    for k in 0..space.len() {
        let a = e.derivative(&l_inv, k);
        let b = e.derivative(&gv, k);
        rhs += e.expect_with(|m| -a[m] * b[m]);
    }
    Ok(IdentityCheck { lhs, rhs })
}

/// Monte Carlo estimate of `E[F(X^t) | X = ω]` compared with `P_tF(ω)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MehlerCheck {
    pub exact: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl MehlerCheck {
    /// Standardized discrepancy; zero when both sides agree deterministically.
    pub fn z_score(&self) -> f64 {
        let diff = self.estimate - self.exact;
        if self.std_error > 0.0 {
            diff / self.std_error
        } else if diff.abs() < 1e-12 {
            0.0
        } else {
            f64::INFINITY.copysign(diff)
        }
    }
}

pub fn verify_mehler<F>(
    f: &F,
    space: &RademacherSpace,
    sampler: &OUProcessSampler,
    samples: u64,
    seed: u64,
) -> Result<MehlerCheck>
where
    F: Functional + ?Sized,
{
    if samples < 2 {
        return Err(Error::Validation("at least two samples are required".into()));
    }
    let e = ExactEnumerator::new(space)?;
    let exact = ChaosDecomposition::from_values(space, e.tabulate(f))
        .apply_semigroup(sampler.time())?
        .reconstruct(sampler.base());
    let acc = mc_mean(samples, DEFAULT_CHUNK, seed, |rng| f.evaluate(&sampler.sample(rng)));
    Ok(MehlerCheck {
        exact,
        estimate: acc.mean,
        std_error: acc.std_error(),
        samples,
    })
}

/// Max over configurations of `|−D^m L^{-1}F − ∫ e^{−mt} P_t D^m F dt|`.
///
/// The left side differentiates the tabulated `L^{-1}F` by definition; the
/// right side expands `D^m F` and integrates coefficient-wise, where order
/// `j` contributes `1/(m + j)`.
pub fn verify_integrated_mehler<F>(f: &F, space: &RademacherSpace, ks: &[usize]) -> Result<f64>
where
    F: Functional + ?Sized,
{
    if ks.is_empty() {
        return Err(Error::Validation("derivative order must be at least one".into()));
    }
    for &k in ks {
        space.check_index(k)?;
    }
    let e = ExactEnumerator::new(space)?;
    let fv = e.tabulate(f);
    let m = ks.len() as f64;
    let l_inv = ChaosDecomposition::from_values(space, fv.clone())
        .apply_l_inverse()
        .values();
    let lhs: Vec<f64> = e.derivative_tuple(&l_inv, ks).iter().map(|v| -v).collect();
    let dm = ChaosDecomposition::from_values(space, e.derivative_tuple(&fv, ks));
    let integrated: Vec<f64> = dm
        .coefficients()
        .iter()
        .enumerate()
        .map(|(a, c)| c / (m + a.count_ones() as f64))
        .collect();
    let rhs = ChaosDecomposition::from_coefficients(space, integrated)?.values();
    Ok(lhs
        .iter()
        .zip(&rhs)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoincareCheck {
    pub variance: f64,
    pub energy: f64,
}

impl PoincareCheck {
    /// `E‖DF‖² − Var(F)`, nonnegative by the inequality.
    pub fn slack(&self) -> f64 {
        self.energy - self.variance
    }
}

pub fn verify_poincare<F>(f: &F, space: &RademacherSpace) -> Result<PoincareCheck>
where
    F: Functional + ?Sized,
{
    let e = ExactEnumerator::new(space)?;
    let fv = e.tabulate(f);
    let mean = e.expect(&fv);
    let variance = e.expect_with(|m| (fv[m] - mean).powi(2));
    let energy = (0..space.len())
        .map(|k| {
            let d = e.derivative(&fv, k);
            e.expect_with(|m| d[m] * d[m])
        })
        .sum();
    Ok(PoincareCheck { variance, energy })
}

/// `E|D^m L^{-1}F|^α` (lhs) and `E|D^m F|^α` (rhs).
pub fn verify_mehler_inequality<F>(
    f: &F,
    space: &RademacherSpace,
    ks: &[usize],
    alpha: f64,
) -> Result<IdentityCheck>
where
    F: Functional + ?Sized,
{
    if !(alpha >= 1.0) {
        return Err(Error::Validation(format!("α must be ≥ 1, got {alpha}")));
    }
    for &k in ks {
        space.check_index(k)?;
    }
    let e = ExactEnumerator::new(space)?;
    let fv = e.tabulate(f);
    let l_inv = ChaosDecomposition::from_values(space, fv.clone())
        .apply_l_inverse()
        .values();
    let a = e.derivative_tuple(&l_inv, ks);
    let b = e.derivative_tuple(&fv, ks);
    Ok(IdentityCheck {
        lhs: e.expect_with(|m| a[m].abs().powf(alpha)),
        rhs: e.expect_with(|m| b[m].abs().powf(alpha)),
    })
}

/// Max coefficient-wise deviation between `LF` and `−δ(DF)`.
pub fn verify_l_equals_minus_delta_d(dec: &ChaosDecomposition) -> Result<f64> {
    let lhs = dec.apply_l();
    let rhs = divergence(&dec.gradients())?;
    Ok(lhs
        .coefficients()
        .iter()
        .zip(rhs.coefficients())
        .map(|(a, b)| (a + b).abs())
        .fold(0.0, f64::max))
}

/// Max over subsets `A, B` of `|E[Y_A Y_B] − 1{A = B}|`.
pub fn orthonormality_defect(space: &RademacherSpace) -> Result<f64> {
    let e = ExactEnumerator::with_limit(space, 10)?;
    let size = e.size();
    let basis: Vec<Vec<f64>> = (0..size)
        .map(|a| {
            (0..size)
                .map(|m| {
                    (0..space.len())
                        .filter(|k| a & (1 << k) != 0)
                        .map(|k| space.y(k, m & (1 << k) != 0))
                        .product()
                })
                .collect()
        })
        .collect();
    let mut worst = 0.0f64;
    for a in 0..size {
        for b in a..size {
            let v = e.expect_with(|m| basis[a][m] * basis[b][m]);
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((v - target).abs());
        }
    }
    Ok(worst)
}

/// The chain-rule remainder `R_k` and its bound at one configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RemainderCheck {
    pub remainder: f64,
    pub bound: f64,
}

impl RemainderCheck {
    pub fn holds(&self) -> bool {
        self.remainder.abs() <= self.bound + 1e-12 * (1.0 + self.bound)
    }
}

fn check_dims(d: usize, g: &dyn SmoothTestFunction) -> Result<()> {
    if d == 0 || g.dim() != d {
        return Err(Error::Validation(format!(
            "test function has dimension {}, the vector has {d} components",
            g.dim()
        )));
    }
    Ok(())
}

/// `R_k = D_k f(F) − Σ_i ∂_i f(F) D_kF_i
///        + X_k/(4 sqrt(p_k q_k)) Σ_ij (∂_ij f(F_k^+) + ∂_ij f(F_k^−)) D_kF_i D_kF_j`
/// against `5/(12 p_k q_k) Σ_ijl ‖∂_ijl f‖_∞ |D_kF_i D_kF_j D_kF_l|`.
pub fn verify_chain_rule<F>(
    fs: &[F],
    g: &dyn SmoothTestFunction,
    space: &RademacherSpace,
    omega: &crate::Configuration,
    k: usize,
) -> Result<RemainderCheck>
where
    F: Functional,
{
    let d = fs.len();
    check_dims(d, g)?;
    space.check_index(k)?;
    space.check_configuration(omega)?;
    let s = space.sqrt_pq(k);
    let pq = space.p(k) * space.q(k);
    let at = |plus: Option<bool>| -> Vec<f64> {
        let mut w = omega.clone();
        if let Some(v) = plus {
            w.set(k, v);
        }
        fs.iter().map(|f| f.evaluate(&w)).collect()
    };
    let (x, xp, xm) = (at(None), at(Some(true)), at(Some(false)));
    let dk: Vec<f64> = xp.iter().zip(&xm).map(|(a, b)| s * (a - b)).collect();
    let dkf = s * (g.value(&xp) - g.value(&xm));
    let grad = g.gradient(&x);
    let first: f64 = grad.iter().zip(&dk).map(|(a, b)| a * b).sum();
    let (hp, hm) = (g.hessian(&xp), g.hessian(&xm));
    let mut second = 0.0;
    for i in 0..d {
        for j in 0..d {
            second += (hp[i * d + j] + hm[i * d + j]) * dk[i] * dk[j];
        }
    }
    let second = -omega.sign(k) / (4.0 * s) * second;
    let remainder = dkf - first - second;
    let mut bound = 0.0;
    for i in 0..d {
        for j in 0..d {
            for l in 0..d {
                bound += g.third_sup(i, j, l) * (dk[i] * dk[j] * dk[l]).abs();
            }
        }
    }
    Ok(RemainderCheck {
        remainder,
        bound: 5.0 / (12.0 * pq) * bound,
    })
}

/// Exact tables of a functional vector: values, `D_kF_i` and `−D_kL^{-1}F_i`.
pub(crate) struct ExactVector {
    pub e: ExactEnumerator,
    pub values: Vec<Vec<f64>>,
    /// `[i][k][mask]`
    pub grad: Vec<Vec<Vec<f64>>>,
    /// `[i][k][mask]`
    pub neg_grad_l_inv: Vec<Vec<Vec<f64>>>,
}

impl ExactVector {
    pub fn new<F: Functional>(fs: &[F], space: &RademacherSpace, require_centered: bool) -> Result<Self> {
        let e = ExactEnumerator::new(space)?;
        let n = space.len();
        let values: Vec<Vec<f64>> = fs.iter().map(|f| e.tabulate(f)).collect();
        if require_centered {
            for (i, v) in values.iter().enumerate() {
                let mean = e.expect(v);
                if mean.abs() >= 1e-10 {
                    return Err(Error::Contract(format!(
                        "component {i} is not centered (mean {mean:e})"
                    )));
                }
            }
        }
        let grad = values
            .iter()
            .map(|v| (0..n).map(|k| e.derivative(v, k)).collect())
            .collect();
        let neg_grad_l_inv = values
            .iter()
            .map(|v| {
                let l = ChaosDecomposition::from_values(space, v.clone())
                    .apply_l_inverse()
                    .values();
                (0..n)
                    .map(|k| e.derivative(&l, k).into_iter().map(|x| -x).collect())
                    .collect()
            })
            .collect();
        Ok(Self {
            e,
            values,
            grad,
            neg_grad_l_inv,
        })
    }

    /// `Σ_j |D_kF_j|` at one mask.
    pub fn abs_grad_sum(&self, k: usize, m: usize) -> f64 {
        self.grad.iter().map(|g| g[k][m].abs()).sum()
    }
}

/// Residual of the approximate integration by parts
/// `E[F_i f(F)] − Σ_j E[∂_j f(F) ⟨DF_j, −DL^{-1}F_i⟩]` and its bound.
pub fn verify_approx_ibp<F>(
    fs: &[F],
    g: &dyn SmoothTestFunction,
    space: &RademacherSpace,
    i: usize,
) -> Result<RemainderCheck>
where
    F: Functional,
{
    let d = fs.len();
    check_dims(d, g)?;
    if i >= d {
        return Err(Error::Index { index: i, len: d });
    }
    let ev = ExactVector::new(fs, space, true)?;
    let e = &ev.e;
    let n = space.len();
    let point = |m: usize| -> Vec<f64> { ev.values.iter().map(|v| v[m]).collect() };
    let lhs = e.expect_with(|m| ev.values[i][m] * g.value(&point(m)));
    let rhs = e.expect_with(|m| {
        let grad = g.gradient(&point(m));
        (0..d)
            .map(|j| {
                let inner: f64 = (0..n)
                    .map(|k| ev.grad[j][k][m] * ev.neg_grad_l_inv[i][k][m])
                    .sum();
                grad[j] * inner
            })
            .sum()
    });
    let mut t2 = 0.0;
    let mut t3 = 0.0;
    for k in 0..n {
        let (p, q) = (space.p(k), space.q(k));
        let w2 = (p - q).abs() / (p * q).sqrt();
        let w3 = 1.0 / (p * q);
        t2 += e.expect_with(|m| w2 * ev.abs_grad_sum(k, m).powi(2) * ev.neg_grad_l_inv[i][k][m].abs());
        t3 += e.expect_with(|m| w3 * ev.abs_grad_sum(k, m).powi(3) * ev.neg_grad_l_inv[i][k][m].abs());
    }
    Ok(RemainderCheck {
        remainder: lhs - rhs,
        bound: 0.5 * g.m2() * t2 + 5.0 / 12.0 * g.m3() * t3,
    })
}
