//! Random cubical complexes on the periodic lattice `(Z/nZ)^d`: voxel and
//! plaquette models, intrinsic volumes and their moments.

mod functional;
mod lattice;
mod volumes;

pub use functional::{normalized_volume_functional, translation_classes, VolumeFunctional};
pub use lattice::{
    cell_census, cell_present, CellId, CubicalLattice, CubicalModel, MAX_DIMENSION, MAX_TOP_CELLS,
};
pub use volumes::{
    cell_weight, clt_covariance, clt_targets, expected_intrinsic_volume, intrinsic_volumes,
    n_abdelta, plaquette_covariance, plaquette_oracle_covariance, presence_probability,
    voxel_covariance, voxel_covariance_constant, PlaquetteSign,
};
