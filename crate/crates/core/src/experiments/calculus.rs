use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chaos::{
    verify_adjoint, verify_ibp, verify_integrated_mehler, verify_l_equals_minus_delta_d,
    verify_poincare, ChaosDecomposition,
};
use crate::malliavin::{verify_product_rule, Polynomial, RademacherSpace, TableFunctional};
use crate::{Error, Result};

/// Worst residuals of the exact identities over a batch of random instances.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CalculusSummary {
    pub instances: usize,
    pub product_rule: f64,
    pub adjoint: f64,
    pub ibp: f64,
    pub integrated_mehler: f64,
    pub l_identity: f64,
    /// Smallest `E‖DF‖² − Var F`; must not be negative.
    pub min_poincare_slack: f64,
}

impl CalculusSummary {
    pub fn residuals(&self) -> [(&'static str, f64); 5] {
        [
            ("product_rule", self.product_rule),
            ("adjoint", self.adjoint),
            ("ibp", self.ibp),
            ("integrated_mehler", self.integrated_mehler),
            ("l_identity", self.l_identity),
        ]
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals().iter().map(|r| r.1).fold(0.0, f64::max)
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.max_residual() < tol && self.min_poincare_slack >= -tol
    }
}

/// Random space with `p_k` uniform in `[0.1, 0.9]`.
pub fn random_space<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<RademacherSpace> {
    RademacherSpace::new((0..n).map(|_| rng.random_range(0.1..0.9)).collect())
}

/// Runs every identity on `instances` random functionals over spaces with
/// between 2 and `n_max` coordinates.
pub fn calculus_suite(n_max: usize, instances: usize, seed: u64) -> Result<CalculusSummary> {
    if !(2..=crate::chaos::EXACT_LIMIT).contains(&n_max) {
        return Err(Error::Validation(format!(
            "calculus suite needs 2 ≤ n ≤ {}, got {n_max}",
            crate::chaos::EXACT_LIMIT
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = CalculusSummary {
        instances,
        min_poincare_slack: f64::INFINITY,
        ..Default::default()
    };
    for _ in 0..instances {
        let n = rng.random_range(2..=n_max);
        let space = random_space(n, &mut rng)?;
        let f = TableFunctional::random(n, &mut rng);
        let g = Polynomial::random(&space, &mut rng, 3, 4);
        let omega = space.sample(&mut rng);
        let k = rng.random_range(0..n);
        s.product_rule = s.product_rule.max(verify_product_rule(&f, &g, &space, &omega, k)?);
        let u: Vec<TableFunctional> = (0..n).map(|_| TableFunctional::random(n, &mut rng)).collect();
        s.adjoint = s.adjoint.max(verify_adjoint(&f, &u, &space)?.residual());
        s.ibp = s.ibp.max(verify_ibp(&f, &g, &space)?.residual());
        let order = rng.random_range(1..=n.min(3));
        let ks = rand::seq::index::sample(&mut rng, n, order).into_vec();
        s.integrated_mehler = s.integrated_mehler.max(verify_integrated_mehler(&f, &space, &ks)?);
        let dec = ChaosDecomposition::from_values(&space, f.values().to_vec());
        s.l_identity = s.l_identity.max(verify_l_equals_minus_delta_d(&dec)?);
        s.min_poincare_slack = s.min_poincare_slack.min(verify_poincare(&f, &space)?.slack());
    }
    Ok(s)
}
