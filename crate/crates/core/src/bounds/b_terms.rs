use std::collections::HashMap;

use nalgebra::DMatrix;

use super::moments::Plan;
use super::{
    BoundReport, BoundTerms, MomentBackend, MomentEstimate, ModelInfo, PairMatrix,
    SymmetryClassSpec,
};
use crate::malliavin::{Functional, RademacherSpace};
use crate::{Error, Result};

/// Source of `cov(F_i, F_j)` in the covariance gap `|Σ_ij − cov(F_i, F_j)|`.
#[derive(Clone, Debug, PartialEq)]
pub enum CovarianceSource {
    /// Known exactly, e.g. from a closed-form formula.
    Exact(DMatrix<f64>),
    /// Estimated with the same backend as the derivative moments.
    Estimate,
}

/// A value with a first-order standard error.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
struct Est {
    v: f64,
    se: f64,
}

impl From<MomentEstimate> for Est {
    fn from(m: MomentEstimate) -> Self {
        Est {
            v: m.value,
            se: m.std_error,
        }
    }
}

impl Est {
    fn exact(v: f64) -> Self {
        Est { v, se: 0.0 }
    }

    /// `x^a` for a nonnegative moment; negative noise clamps to zero and the
    /// derivative is taken at `max(x, se)` to stay finite near zero.
    fn pow(self, a: f64) -> Self {
        let v = crate::util::clamped_pow(self.v, a);
        let se = if self.se == 0.0 {
            0.0
        } else {
            a * self.v.max(self.se).powf(a - 1.0) * self.se
        };
        Est { v, se }
    }

    fn mul(self, o: Est) -> Self {
        Est {
            v: self.v * o.v,
            se: ((self.v * o.se).powi(2) + (o.v * self.se).powi(2)).sqrt(),
        }
    }

    fn scale(self, s: f64) -> Self {
        Est {
            v: self.v * s,
            se: self.se * s.abs(),
        }
    }

    /// Sums treat errors as fully correlated, which can only overstate them.
    fn add(self, o: Est) -> Self {
        Est {
            v: self.v + o.v,
            se: self.se + o.se,
        }
    }
}

/// The second-order Poincaré bound `½ Σ_ij [gap + B_1 + B_2 + B_3 + B_4]`.
///
/// Per pair `(i, j)`:
/// * `B_1 = (15/4 Σ_{k,ℓ,m} E[(D_kF_i)²(D_ℓF_i)²]^{½} E[(D_mD_kF_j)²(D_mD_ℓF_j)²]^{½})^{½}`
/// * `B_2 = (3/4 Σ_{k,ℓ,m} (p_mq_m)^{-1} E[(D_mD_kF_i)²(D_mD_ℓF_i)²]^{½} E[(D_mD_kF_j)²(D_mD_ℓF_j)²]^{½})^{½}`
/// * `B_3 = ½ d^{3/2} Σ_k |p_k−q_k|/sqrt(p_kq_k) E[(D_kF_i)²]^{½} E[(D_kF_j)⁴]^{½}`
/// * `B_4 = 5/12 d² Σ_k (p_kq_k)^{-1} E[(D_kF_i)⁴]^{¼} E[(D_kF_j)⁴]^{¾}`
pub fn b_terms<F: Functional>(
    fs: &[F],
    space: &RademacherSpace,
    classes: &SymmetryClassSpec,
    backend: MomentBackend,
    target: &DMatrix<f64>,
    covariance: &CovarianceSource,
    mut info: ModelInfo,
) -> Result<BoundReport> {
    let d = fs.len();
    let n = space.len();
    if d == 0 {
        return Err(Error::Validation("empty functional vector".into()));
    }
    classes.validate(n)?;
    if target.nrows() != d || target.ncols() != d {
        return Err(Error::Validation("target covariance has the wrong shape".into()));
    }
    if let CovarianceSource::Exact(c) = covariance {
        if c.nrows() != d || c.ncols() != d {
            return Err(Error::Validation("covariance matrix has the wrong shape".into()));
        }
    }
    let estimate_cov = matches!(covariance, CovarianceSource::Estimate);

    let mut first_slot: HashMap<usize, usize> = HashMap::new();
    let mut firsts = Vec::new();
    let mut first = |k: usize| {
        *first_slot.entry(k).or_insert_with(|| {
            firsts.push(k);
            firsts.len() - 1
        })
    };
    let single_slots: Vec<usize> = classes.singles.iter().map(|c| first(c.rep)).collect();
    let triple_first: Vec<(usize, usize)> = classes
        .triples
        .iter()
        .map(|t| (first(t.k), first(t.l)))
        .collect();
    let mut second_slot: HashMap<(usize, usize), usize> = HashMap::new();
    let mut seconds = Vec::new();
    let mut second = |k: usize, m: usize| {
        *second_slot.entry((k, m)).or_insert_with(|| {
            seconds.push((k, m));
            seconds.len() - 1
        })
    };
    let triple_second: Vec<(usize, usize)> = classes
        .triples
        .iter()
        .map(|t| (second(t.k, t.m), second(t.l, t.m)))
        .collect();
    let plan = Plan {
        firsts,
        seconds,
        value_needed: estimate_cov,
    };

    let ns = classes.singles.len();
    let nt = classes.triples.len();
    // Layout: [s2 | s4] per (class, i), [pp | tt] per (triple, i), then
    // E[F_i] and E[F_iF_j] if the covariance is estimated.
    let off_s4 = ns * d;
    let off_pp = 2 * ns * d;
    let off_tt = off_pp + nt * d;
    let off_mean = off_tt + nt * d;
    let off_cov = off_mean + d;
    let nq = off_cov + if estimate_cov { d * d } else { 0 };

    let moments = plan.run(fs, space, backend, nq, |c, out| {
        for (ci, &slot) in single_slots.iter().enumerate() {
            for i in 0..d {
                let a2 = c.first[slot][i] * c.first[slot][i];
                out[ci * d + i] = a2;
                out[off_s4 + ci * d + i] = a2 * a2;
            }
        }
        for t in 0..nt {
            let (fk, fl) = triple_first[t];
            let (sk, sl) = triple_second[t];
            for i in 0..d {
                let a = c.first[fk][i] * c.first[fl][i];
                out[off_pp + t * d + i] = a * a;
                let b = c.second[sk][i] * c.second[sl][i];
                out[off_tt + t * d + i] = b * b;
            }
        }
        if estimate_cov {
            for i in 0..d {
                out[off_mean + i] = c.values[i];
                for j in 0..d {
                    out[off_cov + i * d + j] = c.values[i] * c.values[j];
                }
            }
        }
    })?;
    let m = |idx: usize| Est::from(moments[idx]);

    let df = d as f64;
    let mut gap = PairMatrix::zeros(d);
    let mut b1 = PairMatrix::zeros(d);
    let mut b2 = PairMatrix::zeros(d);
    let mut b3 = PairMatrix::zeros(d);
    let mut b4 = PairMatrix::zeros(d);
    for i in 0..d {
        for j in 0..d {
            let cov = match covariance {
                CovarianceSource::Exact(c) => Est::exact(c[(i, j)]),
                CovarianceSource::Estimate => {
                    let e = m(off_cov + i * d + j);
                    Est {
                        v: e.v - m(off_mean + i).v * m(off_mean + j).v,
                        se: e.se,
                    }
                }
            };
            gap.set(i, j, (target[(i, j)] - cov.v).abs(), cov.se);

            let mut s1 = Est::default();
            let mut s2 = Est::default();
            for (t, tc) in classes.triples.iter().enumerate() {
                let mult = tc.multiplicity as f64;
                let pp_i = m(off_pp + t * d + i).pow(0.5);
                let tt_i = m(off_tt + t * d + i).pow(0.5);
                let tt_j = m(off_tt + t * d + j).pow(0.5);
                s1 = s1.add(pp_i.mul(tt_j).scale(mult));
                let pq = space.p(tc.m) * space.q(tc.m);
                s2 = s2.add(tt_i.mul(tt_j).scale(mult / pq));
            }
            let v1 = s1.scale(15.0 / 4.0).pow(0.5);
            let v2 = s2.scale(3.0 / 4.0).pow(0.5);

            let mut s3 = Est::default();
            let mut s4 = Est::default();
            for (ci, sc) in classes.singles.iter().enumerate() {
                let mult = sc.multiplicity as f64;
                let (p, q) = (space.p(sc.rep), space.q(sc.rep));
                let w3 = (p - q).abs() / (p * q).sqrt();
                let w4 = 1.0 / (p * q);
                let e2_i = m(ci * d + i);
                let e4_i = m(off_s4 + ci * d + i);
                let e4_j = m(off_s4 + ci * d + j);
                if w3 > 0.0 {
                    s3 = s3.add(e2_i.pow(0.5).mul(e4_j.pow(0.5)).scale(mult * w3));
                }
                s4 = s4.add(e4_i.pow(0.25).mul(e4_j.pow(0.75)).scale(mult * w4));
            }
            let v3 = s3.scale(0.5 * df.powf(1.5));
            let v4 = s4.scale(5.0 / 12.0 * df * df);
            b1.set(i, j, v1.v, v1.se);
            b2.set(i, j, v2.v, v2.se);
            b3.set(i, j, v3.v, v3.se);
            b4.set(i, j, v4.v, v4.se);
        }
    }
    info.dim = d;
    info.coordinates = n;
    Ok(BoundReport::new(
        BoundTerms::SecondOrderPoincare { gap, b1, b2, b3, b4 },
        info,
    ))
}
