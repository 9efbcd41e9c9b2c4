use std::sync::Arc;

use super::lattice::neighbour_offsets;
use super::{cell_weight, expected_intrinsic_volume, intrinsic_volumes, CubicalLattice, CubicalModel};
use crate::bounds::{SingleClass, SymmetryClassSpec, TripleClass};
use crate::malliavin::{Configuration, Functional, RademacherSpace};
use crate::{Error, Result};

/// `n^{−d/2}(V_j − E[V_j])` on the `n^d` top-cell coordinates.
#[derive(Clone, Debug)]
pub struct VolumeFunctional {
    lattice: Arc<CubicalLattice>,
    model: CubicalModel,
    j: usize,
    p: f64,
    mean: f64,
    scale: f64,
    /// `ξ` weight per face of a top cube, in the lattice's face order.
    face_weights: Vec<f64>,
}

pub fn normalized_volume_functional(
    lattice: &Arc<CubicalLattice>,
    model: CubicalModel,
    p: f64,
    j: usize,
) -> Result<VolumeFunctional> {
    let mean = expected_intrinsic_volume(lattice, model, p, j)?;
    let face_weights = lattice
        .faces()
        .iter()
        .map(|f| cell_weight(f.dirs.count_ones() as usize, j))
        .collect();
    Ok(VolumeFunctional {
        lattice: Arc::clone(lattice),
        model,
        j,
        p,
        mean,
        scale: (lattice.top_cells() as f64).powf(-0.5),
        face_weights,
    })
}

impl VolumeFunctional {
    pub fn index(&self) -> usize {
        self.j
    }

    pub fn model(&self) -> CubicalModel {
        self.model
    }

    pub fn space(&self) -> Result<RademacherSpace> {
        RademacherSpace::homogeneous(self.lattice.top_cells(), self.p)
    }

    /// `Σ_faces |V_j(dim)|`, so that `|D_kF| ≤ sqrt(pq) n^{−d/2}` times this.
    pub fn flip_difference_bound(&self) -> f64 {
        self.face_weights.iter().map(|w| w.abs()).sum::<f64>() * self.scale
    }
}

impl Functional for VolumeFunctional {
    fn evaluate(&self, omega: &Configuration) -> f64 {
        let v = intrinsic_volumes(&self.lattice, omega, self.model)
            .expect("configuration length matches the lattice");
        (v[self.j] - self.mean) * self.scale
    }

    fn flip_difference(&self, omega: &Configuration, k: usize) -> f64 {
        match self.model {
            CubicalModel::Plaquette => self.face_weights[self.face_weights.len() - 1] * self.scale,
            CubicalModel::Voxel => {
                // A face of cube k changes state iff no other incident cube
                // is kept.
                let mut diff = 0.0;
                for (face, &w) in self.lattice.faces().iter().zip(&self.face_weights) {
                    if w != 0.0
                        && face
                            .others
                            .iter()
                            .all(|off| !omega.is_plus(self.lattice.shift(k, off)))
                    {
                        diff += w;
                    }
                }
                diff * self.scale
            }
        }
    }

    fn second_derivative_support(&self, k: usize) -> Option<Vec<usize>> {
        Some(match self.model {
            CubicalModel::Plaquette => Vec::new(),
            CubicalModel::Voxel => self.lattice.neighbours(k),
        })
    }
}

/// Translation classes: one single class, and for the voxel model one triple
/// class `(0, u, w)` per pair of offsets `u, w ∈ {−1,0,1}^d ∖ {0}`, each of
/// multiplicity `n^d`. The plaquette functionals are affine, so no triples.
pub fn translation_classes(lattice: &CubicalLattice, model: CubicalModel) -> Result<SymmetryClassSpec> {
    let nd = lattice.top_cells() as u64;
    let singles = vec![SingleClass {
        rep: 0,
        multiplicity: nd,
    }];
    let triples = match model {
        CubicalModel::Plaquette => Vec::new(),
        CubicalModel::Voxel => {
            let offs = neighbour_offsets(lattice.dimension());
            let mut t = Vec::with_capacity(offs.len() * offs.len());
            for u in &offs {
                for w in &offs {
                    t.push(TripleClass {
                        m: 0,
                        k: lattice.shift(0, u),
                        l: lattice.shift(0, w),
                        multiplicity: nd,
                    });
                }
            }
            t
        }
    };
    let spec = SymmetryClassSpec { singles, triples };
    if spec.total_singles() != nd {
        return Err(Error::Contract("translation classes do not cover the lattice".into()));
    }
    Ok(spec)
}
