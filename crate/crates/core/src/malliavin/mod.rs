//! Finite Rademacher spaces, functionals and discrete Malliavin derivatives.
//!
//! Coordinates are 0-based. A configuration stores `ω_k = +1` as a set bit.

mod configuration;
mod derivative;
mod functional;
mod space;

pub use configuration::{all_configurations, Configuration};
pub use derivative::{
    first_derivative, first_derivative_unchecked, second_derivative, second_derivative_four_point,
    second_derivative_mut, verify_product_rule, DerivativeTable,
};
pub use functional::{
    from_fn, Affine, Constant, FnFunctional, Functional, Polynomial, Product, TableFunctional,
};
pub use space::RademacherSpace;
