use serde::Serialize;

/// A moment value with its Monte Carlo standard error (zero when exact).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
    pub exact: bool,
}

impl MomentEstimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            std_error: 0.0,
            samples: 0,
            exact: true,
        }
    }

    pub fn monte_carlo(value: f64, std_error: f64, samples: u64) -> Self {
        Self {
            value,
            std_error: std_error.max(0.0),
            samples,
            exact: false,
        }
    }
}

/// A `d × d` table of per-pair values with standard errors.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairMatrix {
    d: usize,
    values: Vec<f64>,
    std_errors: Vec<f64>,
}

impl PairMatrix {
    pub fn zeros(d: usize) -> Self {
        Self {
            d,
            values: vec![0.0; d * d],
            std_errors: vec![0.0; d * d],
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.d + j]
    }

    pub fn std_error(&self, i: usize, j: usize) -> f64 {
        self.std_errors[i * self.d + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64, std_error: f64) {
        self.values[i * self.d + j] = value;
        self.std_errors[i * self.d + j] = std_error;
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Standard error of the sum, treating entries as independent.
    pub fn sum_std_error(&self) -> f64 {
        self.std_errors.iter().map(|s| s * s).sum::<f64>().sqrt()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[allow(clippy::large_enum_variant)]
pub enum BoundTerms {
    /// `A_1 + A_2 + A_3`; `a1` holds `E|Σ_ij − ⟨DF_j, −DL^{-1}F_i⟩|` per pair.
    MalliavinStein { a1: PairMatrix, a2: f64, a3: f64 },
    /// `½ Σ_ij [gap + B_1 + B_2 + B_3 + B_4]`.
    SecondOrderPoincare {
        gap: PairMatrix,
        b1: PairMatrix,
        b2: PairMatrix,
        b3: PairMatrix,
        b4: PairMatrix,
    },
}

/// Which model and parameters a report was computed for.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ModelInfo {
    pub model: String,
    pub n: Option<usize>,
    /// `p` or `θ`, whichever parametrises the model.
    pub parameter: Option<f64>,
    pub dim: usize,
    pub coordinates: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub terms: BoundTerms,
    pub total: f64,
    pub total_std_error: f64,
    pub info: ModelInfo,
}

impl BoundReport {
    pub fn new(terms: BoundTerms, info: ModelInfo) -> Self {
        let (total, total_std_error) = total_with_error(&terms);
        Self {
            terms,
            total,
            total_std_error,
            info,
        }
    }

    /// Named per-pair matrices, in output order.
    pub fn pair_terms(&self) -> Vec<(&'static str, &PairMatrix)> {
        match &self.terms {
            BoundTerms::MalliavinStein { a1, .. } => vec![("A1", a1)],
            BoundTerms::SecondOrderPoincare { gap, b1, b2, b3, b4 } => vec![
                ("gap", gap),
                ("B1", b1),
                ("B2", b2),
                ("B3", b3),
                ("B4", b4),
            ],
        }
    }
}

fn total_with_error(terms: &BoundTerms) -> (f64, f64) {
    match terms {
        BoundTerms::MalliavinStein { a1, a2, a3 } => {
            (0.5 * a1.sum() + a2 + a3, 0.5 * a1.sum_std_error())
        }
        BoundTerms::SecondOrderPoincare { gap, b1, b2, b3, b4 } => {
            let parts = [gap, b1, b2, b3, b4];
            let total = 0.5 * parts.iter().map(|m| m.sum()).sum::<f64>();
            let var: f64 = parts.iter().map(|m| m.sum_std_error().powi(2)).sum();
            (total, 0.5 * var.sqrt())
        }
    }
}

/// Recomputes the displayed half-sum (or `A_1 + A_2 + A_3`) from the terms.
pub fn total_bound(report: &BoundReport) -> f64 {
    total_with_error(&report.terms).0
}
