//! Smooth test functions `f: R^d → R` with known derivative sup-norms.

use crate::{Error, Result};

pub trait SmoothTestFunction: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
    /// Row-major `d × d` Hessian.
    fn hessian(&self, x: &[f64]) -> Vec<f64>;
    /// `‖∂²f/∂x_i∂x_j‖_∞`.
    fn second_sup(&self, i: usize, j: usize) -> f64;
    /// `‖∂³f/∂x_i∂x_j∂x_l‖_∞`.
    fn third_sup(&self, i: usize, j: usize, l: usize) -> f64;

    /// `M_2(f)`: the largest second-order sup-norm.
    fn m2(&self) -> f64 {
        let d = self.dim();
        let mut m = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                m = m.max(self.second_sup(i, j));
            }
        }
        m
    }

    fn m3(&self) -> f64 {
        let d = self.dim();
        let mut m = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                for l in 0..d {
                    m = m.max(self.third_sup(i, j, l));
                }
            }
        }
        m
    }
}

/// `g(x) = cos(⟨a, x⟩ + b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cosine {
    pub a: Vec<f64>,
    pub b: f64,
}

impl Cosine {
    pub fn new(a: Vec<f64>, b: f64) -> Self {
        Self { a, b }
    }

    /// Rejects `|a_i| > 1`, which would break `M_1..M_4 ≤ 1`.
    pub fn bounded(a: Vec<f64>, b: f64) -> Result<Self> {
        if let Some(v) = a.iter().find(|v| !(v.abs() <= 1.0)) {
            return Err(Error::Validation(format!(
                "cosine direction entry {v} exceeds 1 in absolute value"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn phase(&self, x: &[f64]) -> f64 {
        self.a.iter().zip(x).map(|(a, x)| a * x).sum::<f64>() + self.b
    }
}

impl SmoothTestFunction for Cosine {
    fn dim(&self) -> usize {
        self.a.len()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.phase(x).cos()
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let s = self.phase(x).sin();
        self.a.iter().map(|a| -a * s).collect()
    }
    fn hessian(&self, x: &[f64]) -> Vec<f64> {
        let c = self.phase(x).cos();
        let d = self.dim();
        let mut h = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                h[i * d + j] = -self.a[i] * self.a[j] * c;
            }
        }
        h
    }
    fn second_sup(&self, i: usize, j: usize) -> f64 {
        (self.a[i] * self.a[j]).abs()
    }
    fn third_sup(&self, i: usize, j: usize, l: usize) -> f64 {
        (self.a[i] * self.a[j] * self.a[l]).abs()
    }
}

/// `g(x) = ⟨a, x⟩ + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Linear {
    pub a: Vec<f64>,
    pub b: f64,
}

impl SmoothTestFunction for Linear {
    fn dim(&self) -> usize {
        self.a.len()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.a.iter().zip(x).map(|(a, x)| a * x).sum::<f64>() + self.b
    }
    fn gradient(&self, _x: &[f64]) -> Vec<f64> {
        self.a.clone()
    }
    fn hessian(&self, _x: &[f64]) -> Vec<f64> {
        vec![0.0; self.dim() * self.dim()]
    }
    fn second_sup(&self, _i: usize, _j: usize) -> f64 {
        0.0
    }
    fn third_sup(&self, _i: usize, _j: usize, _l: usize) -> f64 {
        0.0
    }
}

/// `g(x) = ⟨a, x⟩ + ½ xᵀQx` with symmetric `Q` (row-major).
#[derive(Clone, Debug, PartialEq)]
pub struct Quadratic {
    a: Vec<f64>,
    q: Vec<f64>,
}

impl Quadratic {
    pub fn new(a: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        let d = a.len();
        if q.len() != d * d {
            return Err(Error::Validation("quadratic form has the wrong shape".into()));
        }
        for i in 0..d {
            for j in 0..i {
                if (q[i * d + j] - q[j * d + i]).abs() > 1e-12 {
                    return Err(Error::Validation("quadratic form is not symmetric".into()));
                }
            }
        }
        Ok(Self { a, q })
    }
}

impl SmoothTestFunction for Quadratic {
    fn dim(&self) -> usize {
        self.a.len()
    }
    fn value(&self, x: &[f64]) -> f64 {
        let d = self.dim();
        let mut v: f64 = self.a.iter().zip(x).map(|(a, x)| a * x).sum();
        for i in 0..d {
            for j in 0..d {
                v += 0.5 * x[i] * self.q[i * d + j] * x[j];
            }
        }
        v
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim();
        (0..d)
            .map(|i| self.a[i] + (0..d).map(|j| self.q[i * d + j] * x[j]).sum::<f64>())
            .collect()
    }
    fn hessian(&self, _x: &[f64]) -> Vec<f64> {
        self.q.clone()
    }
    fn second_sup(&self, i: usize, j: usize) -> f64 {
        self.q[i * self.dim() + j].abs()
    }
    fn third_sup(&self, _i: usize, _j: usize, _l: usize) -> f64 {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn numeric_gradient(f: &dyn SmoothTestFunction, x: &[f64]) -> Vec<f64> {
        let h = 1e-6;
        (0..x.len())
            .map(|i| {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[i] += h;
                xm[i] -= h;
                (f.value(&xp) - f.value(&xm)) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        let x = [0.3, -1.2, 0.7];
        let c = Cosine::new(vec![0.5, -1.0, 0.25], 0.4);
        let q = Quadratic::new(
            vec![1.0, 0.0, -2.0],
            vec![1.0, 0.5, 0.0, 0.5, -1.0, 0.3, 0.0, 0.3, 2.0],
        )
        .unwrap();
        for f in [&c as &dyn SmoothTestFunction, &q] {
            let g = f.gradient(&x);
            for (a, b) in g.iter().zip(numeric_gradient(f, &x)) {
                assert!((a - b).abs() < 1e-6);
            }
            let h = f.hessian(&x);
            for i in 0..3 {
                let mut xp = x.to_vec();
                xp[i] += 1e-6;
                let gp = f.gradient(&xp);
                for j in 0..3 {
                    assert!(((gp[j] - g[j]) / 1e-6 - h[i * 3 + j]).abs() < 1e-4);
                }
            }
        }
        assert_eq!(c.m3(), 1.0);
        assert_eq!(c.m2(), 1.0);
        assert_eq!(q.m2(), 2.0);
        assert_eq!(q.m3(), 0.0);
    }

    #[test]
    fn bounded_cosine_rejects_large_directions() {
        assert!(Cosine::bounded(vec![1.0, -0.5], 0.0).is_ok());
        assert!(Cosine::bounded(vec![1.5], 0.0).is_err());
    }
}
