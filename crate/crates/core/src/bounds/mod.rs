//! Moment estimation, the second-order Poincaré bound, Gaussian targets and
//! the `d_4` lower-bound surrogate.

mod b_terms;
mod classes;
mod gaussian;
mod moments;
mod rate;
mod report;
mod surrogate;

pub use b_terms::{b_terms, CovarianceSource};
pub use classes::{SingleClass, SymmetryClassSpec, TripleClass, DEFAULT_TUPLE_BUDGET};
pub use gaussian::{gaussian_ibp_check, psd_factor, GaussianTarget, IbpCheck, IbpRow};
pub use moments::{
    estimate_moment, Factor, MomentBackend, MomentExpr, AUTO_EXACT_LIMIT, DEFAULT_SAMPLES,
};
pub use rate::{fit_rate, RateFit};
pub use report::{total_bound, BoundReport, BoundTerms, MomentEstimate, ModelInfo, PairMatrix};
pub use surrogate::{d4_surrogate, default_family, SurrogateResult, SurrogateRow};
