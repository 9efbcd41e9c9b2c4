use nalgebra::DMatrix;

use super::{cell_census, CubicalLattice, CubicalModel};
use crate::bounds::GaussianTarget;
use crate::malliavin::Configuration;
use crate::util::binomial;
use crate::{Error, Result};

/// `V_j(δ) = (−1)^{δ−j} C(δ, j)`, the contribution of an open `δ`-cell to
/// the `j`-th intrinsic volume.
pub fn cell_weight(delta: usize, j: usize) -> f64 {
    if j > delta {
        return 0.0;
    }
    let sign = if (delta - j).is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * binomial(delta as u64, j as u64)
}

/// `(V_0, …, V_d)` of the complex.
pub fn intrinsic_volumes(lattice: &CubicalLattice, kept: &Configuration, model: CubicalModel) -> Result<Vec<f64>> {
    let counts = cell_census(lattice, kept, model)?;
    Ok(volumes_from_census(&counts))
}

pub(crate) fn volumes_from_census(counts: &[u64]) -> Vec<f64> {
    let d = counts.len() - 1;
    (0..=d)
        .map(|j| {
            counts
                .iter()
                .enumerate()
                .map(|(delta, &c)| c as f64 * cell_weight(delta, j))
                .sum()
        })
        .collect()
}

fn check(lattice: &CubicalLattice, p: f64, j: usize) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Validation(format!("probability {p} is outside [0, 1]")));
    }
    if j > lattice.dimension() {
        return Err(Error::Index {
            index: j,
            len: lattice.dimension() + 1,
        });
    }
    Ok(())
}

/// `P_δ = 1 − q^{2^{d−δ}}`, the probability that a `δ`-cell is present in the
/// voxel model.
pub fn presence_probability(d: usize, p: f64, delta: usize) -> f64 {
    1.0 - (1.0 - p).powi(1 << (d - delta))
}

/// Voxel: `Σ_{δ=j}^d N_δ P_δ V_j(δ)`. Plaquette: `(−1)^{d−j} C(d, j)(p−1) n^d`
/// for `j < d` and `p n^d` for `j = d`.
pub fn expected_intrinsic_volume(lattice: &CubicalLattice, model: CubicalModel, p: f64, j: usize) -> Result<f64> {
    check(lattice, p, j)?;
    let d = lattice.dimension();
    let nd = lattice.top_cells() as f64;
    Ok(match model {
        CubicalModel::Voxel => (j..=d)
            .map(|delta| lattice.cell_count(delta) as f64 * presence_probability(d, p, delta) * cell_weight(delta, j))
            .sum(),
        CubicalModel::Plaquette if j == d => p * nd,
        CubicalModel::Plaquette => cell_weight(d, j) * (p - 1.0) * nd,
    })
}

/// `N_{a,b,δ} = Σ_ℓ (−1)^{δ−ℓ} C(δ,ℓ) C(ℓ,a) C(ℓ,b) 2^{δ+ℓ−a−b}`: ordered
/// pairs of faces of dimensions `a`, `b` of a `δ`-cube whose smallest common
/// cube is the whole cube.
pub fn n_abdelta(a: usize, b: usize, delta: usize) -> i64 {
    let c = |n: usize, k: usize| crate::util::binomial_u64(n as u64, k as u64) as i64;
    (0..=delta)
        .filter(|&l| l >= a && l >= b)
        .map(|l| {
            let sign = if (delta - l).is_multiple_of(2) { 1 } else { -1 };
            sign * c(delta, l) * c(l, a) * c(l, b) * (1i64 << (delta + l - a - b))
        })
        .sum()
}

/// `c(i, j) = Σ_{a,b,δ} V_i(a)V_j(b) C(d,δ) N_{a,b,δ} q^{2^{d−a}+2^{d−b}}(q^{−2^{d−δ}} − 1)`,
/// so that `cov(V_i, V_j) = c(i, j) n^d` in the voxel model.
pub fn voxel_covariance_constant(d: usize, p: f64, i: usize, j: usize) -> f64 {
    let q = 1.0 - p;
    if q == 0.0 {
        return 0.0;
    }
    let mut c = 0.0;
    for a in 0..=d {
        for b in 0..=d {
            let w = cell_weight(a, i) * cell_weight(b, j);
            if w == 0.0 {
                continue;
            }
            for delta in a.max(b)..=d {
                let nabd = n_abdelta(a, b, delta);
                if nabd == 0 {
                    continue;
                }
                let pw = |e: usize| (1u64 << (d - e)) as f64;
                c += w
                    * binomial(d as u64, delta as u64)
                    * nabd as f64
                    * q.powf(pw(a) + pw(b))
                    * (q.powf(-pw(delta)) - 1.0);
            }
        }
    }
    c
}

pub fn voxel_covariance(lattice: &CubicalLattice, p: f64, i: usize, j: usize) -> Result<f64> {
    check(lattice, p, i)?;
    check(lattice, p, j)?;
    Ok(voxel_covariance_constant(lattice.dimension(), p, i, j) * lattice.top_cells() as f64)
}

/// The plaquette covariance in the unsigned form `C(d,i) C(d,j) p(1−p) n^d`.
pub fn plaquette_covariance(lattice: &CubicalLattice, p: f64, i: usize, j: usize) -> Result<f64> {
    check(lattice, p, i)?;
    check(lattice, p, j)?;
    let d = lattice.dimension() as u64;
    Ok(binomial(d, i as u64) * binomial(d, j as u64) * p * (1.0 - p) * lattice.top_cells() as f64)
}

/// The plaquette covariance from the definition: only top cells are random,
/// each contributing `V_i(d) V_j(d) p(1−p)`.
pub fn plaquette_oracle_covariance(lattice: &CubicalLattice, p: f64, i: usize, j: usize) -> Result<f64> {
    check(lattice, p, i)?;
    check(lattice, p, j)?;
    let d = lattice.dimension();
    Ok(cell_weight(d, i) * cell_weight(d, j) * p * (1.0 - p) * lattice.top_cells() as f64)
}

/// Which plaquette covariance to use as a Gaussian target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaquetteSign {
    /// `C(d,i) C(d,j) p(1−p)`, as stated.
    #[default]
    Stated,
    /// `(−1)^{i+j} C(d,i) C(d,j) p(1−p)`, from the definition.
    Signed,
}

/// Limit covariance of `n^{−d/2}(V_j − E V_j)`, `j = 0, …, d`.
pub fn clt_covariance(d: usize, model: CubicalModel, p: f64, sign: PlaquetteSign) -> DMatrix<f64> {
    DMatrix::from_fn(d + 1, d + 1, |i, j| match model {
        CubicalModel::Voxel => voxel_covariance_constant(d, p, i, j),
        CubicalModel::Plaquette => {
            let s = match sign {
                PlaquetteSign::Stated => 1.0,
                PlaquetteSign::Signed => cell_weight(d, i).signum() * cell_weight(d, j).signum(),
            };
            s * binomial(d as u64, i as u64) * binomial(d as u64, j as u64) * p * (1.0 - p)
        }
    })
}

pub fn clt_targets(lattice: &CubicalLattice, model: CubicalModel, p: f64, sign: PlaquetteSign) -> Result<GaussianTarget> {
    check(lattice, p, 0)?;
    GaussianTarget::new(clt_covariance(lattice.dimension(), model, p, sign))
}
