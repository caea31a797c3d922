use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bound on every AR and MA coefficient.
pub const COEFFICIENT_BOUND: f64 = 0.99;

/// ARMA coefficients with the plus sign convention on the MA terms:
///
/// y_t = c + Σ φ_i·y_{t−i} + Σ θ_j·ε_{t−j} + ε_t
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmaParams {
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
    pub intercept: f64,
}

impl ArmaParams {
    pub fn new(ar: Vec<f64>, ma: Vec<f64>, intercept: f64) -> Self {
        Self { ar, ma, intercept }
    }

    /// All-zero coefficients of the given orders.
    pub fn zeros(p: usize, q: usize, intercept: f64) -> Self {
        Self::new(vec![0.0; p], vec![0.0; q], intercept)
    }

    pub fn p(&self) -> usize {
        self.ar.len()
    }

    pub fn q(&self) -> usize {
        self.ma.len()
    }

    /// Index of the first observation with a full set of lags.
    pub fn max_lag(&self) -> usize {
        self.p().max(self.q())
    }

    /// Packs as `[φ.., θ.., c]`.
    pub(crate) fn to_vector(&self) -> Vec<f64> {
        let mut v = self.ar.clone();
        v.extend_from_slice(&self.ma);
        v.push(self.intercept);
        v
    }

    pub(crate) fn from_vector(v: &[f64], p: usize, q: usize) -> Self {
        Self {
            ar: v[..p].to_vec(),
            ma: v[p..p + q].to_vec(),
            intercept: v[p + q],
        }
    }

    /// Copy with every coefficient clamped into the ±0.99 box.
    pub fn clamped(&self) -> Self {
        let clamp = |v: &[f64]| -> Vec<f64> {
            v.iter()
                .map(|x| x.clamp(-COEFFICIENT_BOUND, COEFFICIENT_BOUND))
                .collect()
        };
        Self {
            ar: clamp(&self.ar),
            ma: clamp(&self.ma),
            intercept: self.intercept,
        }
    }

    /// Σ (|coef| − 0.99)² over the coefficients outside the box.
    pub(crate) fn box_violation(&self) -> f64 {
        self.ar
            .iter()
            .chain(&self.ma)
            .map(|x| (x.abs() - COEFFICIENT_BOUND).max(0.0).powi(2))
            .sum()
    }

    /// One-step prediction of `values[t]` from its past, with `errors` aligned to `values`.
    pub(crate) fn predict_at(&self, values: &[f64], errors: &[f64], t: usize) -> f64 {
        self.predict_next(&values[..t], &errors[..t])
    }

    /// Prediction of the value following `values`.
    pub(crate) fn predict_next(&self, values: &[f64], errors: &[f64]) -> f64 {
        let t = values.len();
        let ar: f64 = self.ar.iter().enumerate().map(|(i, phi)| phi * values[t - 1 - i]).sum();
        let ma: f64 = self
            .ma
            .iter()
            .enumerate()
            .map(|(j, theta)| theta * errors[t - 1 - j])
            .sum();
        self.intercept + ar + ma
    }
}

/// Conditional residuals ε_t for t ≥ max(p, q) and their sum of squares.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualTrace {
    pub residuals: Vec<f64>,
    pub css: f64,
}

/// Full-length error vector with pre-sample entries fixed at zero.
pub(crate) fn conditional_errors(params: &ArmaParams, values: &[f64]) -> Vec<f64> {
    let m = params.max_lag();
    let mut errors = vec![0.0; values.len()];
    for t in m..values.len() {
        errors[t] = values[t] - params.predict_at(values, &errors, t);
    }
    errors
}

/// ε_t = y_t − c − Σφ_i·y_{t−i} − Σθ_j·ε_{t−j}, pre-sample ε = 0.
pub fn css_residuals(params: &ArmaParams, values: &[f64]) -> Result<ResidualTrace> {
    let m = params.max_lag();
    if values.len() <= m {
        return Err(Error::TooShort {
            needed: m + 1,
            got: values.len(),
        });
    }
    let errors = conditional_errors(params, values);
    let residuals = errors[m..].to_vec();
    let css = residuals.iter().map(|e| e * e).sum();
    Ok(ResidualTrace { residuals, css })
}
