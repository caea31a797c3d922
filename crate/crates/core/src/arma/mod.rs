//! ARMA(p, q) and ARIMA(p, d, q) estimation by conditional sum of squares,
//! order selection and recursive forecasting.
//!
//! The MA terms use the plus convention throughout:
//! `y′_t = c + Σ φ_i y′_{t−i} + Σ θ_j ε_{t−j} + ε_t`, where `y′` is the
//! `d`-times differenced series. Pre-sample errors are fixed at zero
//! (conditional likelihood), and all coefficients live in a ±0.99 box.

mod css;
mod model;
pub mod simplex;

pub use css::{css_residuals, ArmaParams, ResidualTrace, COEFFICIENT_BOUND};
pub use model::{
    aic, fit_arima, fit_arma, forecast, rolling_one_step, select_order, ArimaModel, ArimaModelJson, FitDiagnostics,
    OrderSelection,
};
