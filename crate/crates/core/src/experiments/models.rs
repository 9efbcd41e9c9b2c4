use std::sync::Arc;

use nalgebra::DMatrix;
use rand_chacha::ChaCha8Rng;

use crate::bounds::{
    b_terms, d4_surrogate, default_family, BoundReport, CovarianceSource, GaussianTarget,
    ModelInfo, MomentBackend, SurrogateResult, SymmetryClassSpec,
};
use crate::cubical::{
    clt_covariance, normalized_volume_functional, plaquette_oracle_covariance, translation_classes,
    voxel_covariance_constant, CubicalLattice, CubicalModel, PlaquetteSign, VolumeFunctional,
};
use crate::graphs::{
    clt_target_subgraphs, degree_classes, degree_limit_target, normalized_degree_covariance,
    normalized_degree_functional, normalized_subgraph_covariance, normalized_subgraph_functional,
    subgraph_classes, DegreeFunctional, EdgeIndexer, GraphSpec, SubgraphFunctional,
};
use crate::malliavin::{Configuration, Functional, RademacherSpace};
use crate::{Error, Result};

/// Everything needed to bound or simulate one normalized vector.
pub struct ModelSetup<F> {
    pub functionals: Vec<F>,
    pub space: RademacherSpace,
    pub classes: SymmetryClassSpec,
    pub target: GaussianTarget,
    /// Exact covariance of the functionals.
    pub covariance: DMatrix<f64>,
    pub info: ModelInfo,
}

impl<F: Functional> ModelSetup<F> {
    pub fn bound(&self, backend: MomentBackend) -> Result<BoundReport> {
        b_terms(
            &self.functionals,
            &self.space,
            &self.classes,
            backend,
            self.target.covariance(),
            &CovarianceSource::Exact(self.covariance.clone()),
            self.info.clone(),
        )
    }

    pub fn surrogate(&self, samples: u64, seed: u64) -> Result<SurrogateResult> {
        let family = default_family(self.functionals.len());
        d4_surrogate(
            functional_sampler(&self.functionals, &self.space),
            &self.target,
            &family,
            samples,
            seed,
        )
    }
}

/// Draws a configuration and writes the functional values.
pub fn functional_sampler<'a, F: Functional>(
    fs: &'a [F],
    space: &'a RademacherSpace,
) -> impl Fn(&mut ChaCha8Rng, &mut Vec<f64>) + Sync + 'a {
    move |rng, out| {
        let mut omega = Configuration::all_minus(space.len());
        space.sample_into(rng, &mut omega);
        out.clear();
        out.extend(fs.iter().map(|f| f.evaluate(&omega)));
    }
}

/// Normalized subgraph counts `n^{1−v_i}(X_{Γ_i} − E X_{Γ_i})` in `G(n, p)`.
pub fn subgraph_setup(patterns: &[GraphSpec], n: usize, p: f64) -> Result<ModelSetup<SubgraphFunctional>> {
    if patterns.is_empty() {
        return Err(Error::Validation("no patterns given".into()));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Validation(format!("p = {p} must lie in (0, 1)")));
    }
    let indexer = Arc::new(EdgeIndexer::new(n)?);
    let functionals = patterns
        .iter()
        .map(|g| normalized_subgraph_functional(g, &indexer, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(ModelSetup {
        space: RademacherSpace::homogeneous(indexer.edges(), p)?,
        classes: subgraph_classes(&indexer, patterns)?,
        target: clt_target_subgraphs(patterns, p)?,
        covariance: normalized_subgraph_covariance(patterns, n, p)?,
        info: ModelInfo {
            model: "subgraph".into(),
            n: Some(n),
            parameter: Some(p),
            ..Default::default()
        },
        functionals,
    })
}

/// Normalized degree counts `(V_i − E V_i)/sqrt(n)` at `p = θ/(n−1)`.
pub fn degree_setup(degrees: &[usize], n: usize, theta: f64) -> Result<ModelSetup<DegreeFunctional>> {
    if degrees.is_empty() {
        return Err(Error::Validation("no degrees given".into()));
    }
    let indexer = Arc::new(EdgeIndexer::new(n)?);
    let functionals = degrees
        .iter()
        .map(|&i| normalized_degree_functional(&indexer, theta, i))
        .collect::<Result<Vec<_>>>()?;
    let p = functionals[0].p();
    Ok(ModelSetup {
        space: RademacherSpace::homogeneous(indexer.edges(), p)?,
        classes: degree_classes(&indexer)?,
        target: degree_limit_target(theta, degrees)?,
        covariance: normalized_degree_covariance(n, theta, degrees)?,
        info: ModelInfo {
            model: "degree".into(),
            n: Some(n),
            parameter: Some(theta),
            ..Default::default()
        },
        functionals,
    })
}

/// Normalized intrinsic volumes `n^{−d/2}(V_j − E V_j)`, `j = 0, …, d`.
///
/// The plaquette target uses the covariance in the chosen sign convention;
/// the exact covariance always comes from the definition.
pub fn cubical_setup(
    d: usize,
    n: usize,
    model: CubicalModel,
    p: f64,
    sign: PlaquetteSign,
) -> Result<ModelSetup<VolumeFunctional>> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Validation(format!("p = {p} must lie in (0, 1)")));
    }
    let lattice = Arc::new(CubicalLattice::new(d, n)?);
    let functionals = (0..=d)
        .map(|j| normalized_volume_functional(&lattice, model, p, j))
        .collect::<Result<Vec<_>>>()?;
    let nd = lattice.top_cells() as f64;
    let covariance = match model {
        CubicalModel::Voxel => DMatrix::from_fn(d + 1, d + 1, |i, j| voxel_covariance_constant(d, p, i, j)),
        CubicalModel::Plaquette => {
            let mut c = DMatrix::zeros(d + 1, d + 1);
            for i in 0..=d {
                for j in 0..=d {
                    c[(i, j)] = plaquette_oracle_covariance(&lattice, p, i, j)? / nd;
                }
            }
            c
        }
    };
    let name = match model {
        CubicalModel::Voxel => "voxel",
        CubicalModel::Plaquette => "plaquette",
    };
    Ok(ModelSetup {
        space: RademacherSpace::homogeneous(lattice.top_cells(), p)?,
        classes: translation_classes(&lattice, model)?,
        target: GaussianTarget::new(clt_covariance(d, model, p, sign))?,
        covariance,
        info: ModelInfo {
            model: name.into(),
            n: Some(n),
            parameter: Some(p),
            ..Default::default()
        },
        functionals,
    })
}
