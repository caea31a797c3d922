use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Ordinary least-squares fit.
#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub residuals: Vec<f64>,
    /// rows − columns
    pub dof: usize,
}

impl OlsFit {
    pub fn rss(&self) -> f64 {
        self.residuals.iter().map(|e| e * e).sum()
    }

    pub fn t_ratio(&self, i: usize) -> f64 {
        self.coefficients[i] / self.std_errors[i]
    }
}

/// Relative size below which a diagonal entry of R marks a dependent column.
const RANK_TOLERANCE: f64 = 1e-10;

/// Least squares through a thin QR factorization of `x`.
///
/// Standard errors are `sqrt(s² · diag((XᵀX)⁻¹))` with `(XᵀX)⁻¹ = R⁻¹R⁻ᵀ`
/// and `s² = rss / dof`.
pub fn ols_fit(x: &DMatrix<f64>, y: &[f64]) -> Result<OlsFit> {
    let (n, k) = x.shape();
    if n != y.len() {
        return Err(Error::LengthMismatch {
            left: n,
            right: y.len(),
        });
    }
    if k == 0 || n <= k {
        return Err(Error::Shape(format!("need more rows than columns, got {n}×{k}")));
    }
    let qr = x.clone().qr();
    let r = qr.r();
    let scale = (0..k).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    if let Some(column) = (0..k).find(|&i| !(r[(i, i)].abs() > RANK_TOLERANCE * scale)) {
        return Err(Error::RankDeficient { column });
    }

    let y = DVector::from_column_slice(y);
    let qty = qr.q().transpose() * &y;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or(Error::RankDeficient { column: 0 })?;
    let residuals = &y - x * &beta;
    let dof = n - k;
    let sigma2 = residuals.norm_squared() / dof as f64;

    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or(Error::RankDeficient { column: 0 })?;
    let std_errors = (0..k).map(|i| (sigma2 * r_inv.row(i).norm_squared()).sqrt()).collect();

    Ok(OlsFit {
        coefficients: beta.iter().copied().collect(),
        std_errors,
        residuals: residuals.iter().copied().collect(),
        dof,
    })
}
