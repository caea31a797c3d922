//! Unit-root testing and trend/residual decomposition.

mod adf;
mod decompose;
mod ols;

pub use adf::{
    adf_test, interpolate_p_value, schwert_lags, AdfResult, CRIT_10PCT, CRIT_1PCT, CRIT_5PCT,
    MIN_LENGTH as ADF_MIN_LENGTH, P_VALUE_METHOD,
};
pub use decompose::{decompose, Decomposition};
pub use ols::{ols_fit, OlsFit};
