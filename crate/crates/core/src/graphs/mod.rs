//! Erdős–Rényi graphs over edge coordinates: subgraph and degree counts,
//! their moments, and normalized functionals.

mod classes;
mod formulas;
mod functional;
mod indexer;
mod pattern;
mod sample;

pub use classes::edge_triple_classes;
pub use formulas::{
    asymptotic_sigma, clt_target_subgraphs, copies_in_complete, covariance_leading,
    degree_covariance, degree_limit_sigma, degree_limit_target, degree_probability,
    exact_subgraph_covariance, expected_degree_count, expected_subgraph_count,
    normalized_degree_covariance, normalized_subgraph_covariance,
};
pub use functional::{
    normalized_degree_functional, normalized_subgraph_functional, DegreeFunctional,
    SubgraphFunctional,
};
pub use indexer::EdgeIndexer;
pub use pattern::{GraphSpec, MAX_PATTERN_VERTICES};
pub use sample::{degree_count, subgraph_count, ERSample};

pub(crate) use functional::subgraph_admits;

/// Symmetry classes for a vector of subgraph functionals.
pub fn subgraph_classes(indexer: &EdgeIndexer, patterns: &[GraphSpec]) -> crate::Result<crate::bounds::SymmetryClassSpec> {
    edge_triple_classes(indexer, |s| patterns.iter().any(|g| subgraph_admits(g, s)))
}

/// Symmetry classes for a vector of degree functionals.
pub fn degree_classes(indexer: &EdgeIndexer) -> crate::Result<crate::bounds::SymmetryClassSpec> {
    edge_triple_classes(indexer, |s| s == 1)
}
