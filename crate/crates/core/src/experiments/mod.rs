//! Bound, surrogate and identity runs for the models, as driven by the CLI
//! and the acceptance suite.

mod calculus;
mod models;

pub use calculus::{calculus_suite, random_space, CalculusSummary};
pub use models::{cubical_setup, degree_setup, functional_sampler, subgraph_setup, ModelSetup};
