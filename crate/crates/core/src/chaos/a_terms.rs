use nalgebra::DMatrix;

use super::verify::ExactVector;
use crate::bounds::{BoundReport, BoundTerms, ModelInfo, PairMatrix};
use crate::malliavin::{Functional, RademacherSpace};
use crate::{Error, Result};

/// Exact `A_1 + A_2 + A_3` for a centered vector against `N(0, Σ)`.
///
/// `A_1 = ½ Σ_ij E|Σ_ij − ⟨DF_j, −DL^{-1}F_i⟩|`,
/// `A_2 = ¼ E⟨|p−q|/sqrt(pq) (Σ_j|DF_j|)², Σ_i|−DL^{-1}F_i|⟩`,
/// `A_3 = 5/24 E⟨(pq)^{-1} (Σ_j|DF_j|)³, Σ_i|−DL^{-1}F_i|⟩`.
pub fn exact_a_terms<F: Functional>(
    fs: &[F],
    sigma: &DMatrix<f64>,
    space: &RademacherSpace,
) -> Result<BoundReport> {
    let d = fs.len();
    if d == 0 || sigma.nrows() != d || sigma.ncols() != d {
        return Err(Error::Validation(format!(
            "Σ is {}×{}, the vector has {d} components",
            sigma.nrows(),
            sigma.ncols()
        )));
    }
    let ev = ExactVector::new(fs, space, true)?;
    let e = &ev.e;
    let n = space.len();
    let mut a1 = PairMatrix::zeros(d);
    for i in 0..d {
        for j in 0..d {
            let v = e.expect_with(|m| {
                let inner: f64 = (0..n)
                    .map(|k| ev.grad[j][k][m] * ev.neg_grad_l_inv[i][k][m])
                    .sum();
                (sigma[(i, j)] - inner).abs()
            });
            a1.set(i, j, v, 0.0);
        }
    }
    let (mut a2, mut a3) = (0.0, 0.0);
    for k in 0..n {
        let (p, q) = (space.p(k), space.q(k));
        let w2 = (p - q).abs() / (p * q).sqrt();
        let w3 = 1.0 / (p * q);
        let (s2, s3) = ev
            .e
            .weights()
            .iter()
            .enumerate()
            .fold((0.0, 0.0), |(s2, s3), (m, w)| {
                let g = ev.abs_grad_sum(k, m);
                let h: f64 = ev.neg_grad_l_inv.iter().map(|t| t[k][m].abs()).sum();
                (s2 + w * g * g * h, s3 + w * g * g * g * h)
            });
        a2 += w2 * s2;
        a3 += w3 * s3;
    }
    let info = ModelInfo {
        model: "exact".into(),
        n: Some(n),
        parameter: space.homogeneous_p(),
        dim: d,
        coordinates: n,
    };
    Ok(BoundReport::new(
        BoundTerms::MalliavinStein {
            a1,
            a2: 0.25 * a2,
            a3: 5.0 / 24.0 * a3,
        },
        info,
    ))
}
