//! Discrete Malliavin calculus on finite Rademacher spaces.
//!
//! The crate is organised bottom-up:
//!
//! * [`malliavin`]: the probability space, configurations, functionals and
//!   the discrete gradient `D_k F = sqrt(p_k q_k) (F_k^+ - F_k^-)`.
//! * [`chaos`]: exact Walsh (chaos) expansions on small spaces, the operators
//!   `L`, `L^{-1}`, `P_t` and the divergence, identity verifiers and the exact
//!   Malliavin–Stein A-terms.
//! * [`bounds`]: moment estimation (exact or Monte Carlo), symmetry classes,
//!   the second-order Poincaré B-terms, Gaussian targets and the d4 surrogate.
//! * [`graphs`] and [`cubical`]: the Erdős–Rényi and random cubical complex
//!   models together with their mean and covariance formulas.
//! * [`experiments`]: the bound/rate/surrogate runs driven by the CLI.

// `!(x >= 0.0)` style checks are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod chaos;
pub mod cubical;
pub mod experiments;
pub mod graphs;
mod error;
pub mod malliavin;
pub mod smooth;
pub mod util;

pub use error::{Error, Result};
pub use malliavin::{Configuration, Functional, RademacherSpace};
