//! Exact Walsh (chaos) expansions on small spaces, the operators built on
//! them, and exact checks of the calculus identities.

mod a_terms;
mod decomposition;
mod enumerate;
mod sampler;
mod verify;

pub use a_terms::exact_a_terms;
pub use decomposition::{divergence, walsh_expand, ChaosDecomposition};
pub use enumerate::{ExactEnumerator, EXACT_LIMIT};
pub use sampler::OUProcessSampler;
pub use verify::{
    orthonormality_defect, verify_adjoint, verify_approx_ibp, verify_chain_rule, verify_ibp,
    verify_integrated_mehler, verify_l_equals_minus_delta_d, verify_mehler,
    verify_mehler_inequality, verify_poincare, IdentityCheck, MehlerCheck, PoincareCheck,
    RemainderCheck,
};
