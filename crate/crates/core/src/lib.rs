//! Stock-price forecasting benchmark.
//!
//! Four forecasters (LSTM, GRU, ARMA, ARIMA) evaluated on the most recent
//! one, two-and-a-half and five trading years of a daily OHLCV table, with
//! ADF stationarity testing, moving-average decomposition and the usual
//! regression error metrics.

pub mod arma;
pub mod bench;
pub mod error;
pub mod market_data;
pub mod metrics;
pub mod preprocess;
pub mod recurrent;
pub mod series;
pub mod stationarity;

pub use error::{Error, Result};
pub use series::Series;
