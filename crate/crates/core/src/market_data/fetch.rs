use std::time::Duration;

use chrono::NaiveDate;

use super::{parse_ohlcv_csv_for, TimeSeriesTable};
use crate::error::{Error, Result};

/// Environment variable holding the default endpoint base URL.
pub const DATA_URL_ENV: &str = "HORIZONBENCH_DATA_URL";

/// Blocking client for `GET {base}/{symbol}?start=YYYY-MM-DD&end=YYYY-MM-DD`
/// endpoints that answer with the OHLCV CSV schema.
///
/// Connection errors and 5xx responses are retried with exponential backoff;
/// any other non-success status fails immediately.
#[derive(Debug, Clone)]
pub struct FetchClient {
    pub base_url: String,
    pub max_attempts: usize,
    pub initial_backoff: Duration,
    pub timeout: Duration,
}

impl FetchClient {
    pub fn new(base_url: impl Into<String>) -> Self {
        Self {
            base_url: base_url.into(),
            max_attempts: 3,
            initial_backoff: Duration::from_millis(250),
            timeout: Duration::from_secs(30),
        }
    }

    /// Client for the URL in `HORIZONBENCH_DATA_URL`.
    pub fn from_env() -> Result<Self> {
        std::env::var(DATA_URL_ENV).map(Self::new).map_err(|_| Error::Config {
            key: DATA_URL_ENV.into(),
            message: "environment variable not set".into(),
        })
    }

    pub fn with_backoff(mut self, initial: Duration) -> Self {
        self.initial_backoff = initial;
        self
    }

    pub fn url_for(&self, symbol: &str, start: NaiveDate, end: NaiveDate) -> String {
        format!(
            "{}/{}?start={}&end={}",
            self.base_url.trim_end_matches('/'),
            symbol,
            start.format("%Y-%m-%d"),
            end.format("%Y-%m-%d")
        )
    }

    pub fn fetch_ohlcv(&self, symbol: &str, start: NaiveDate, end: NaiveDate) -> Result<TimeSeriesTable> {
        let body = self.fetch_body(&self.url_for(symbol, start, end))?;
        parse_ohlcv_csv_for(&body, symbol)
    }

    fn fetch_body(&self, url: &str) -> Result<String> {
        let client = reqwest::blocking::Client::builder()
            .timeout(self.timeout)
            .build()
            .map_err(|e| Error::Network {
                attempts: 0,
                message: e.to_string(),
            })?;
        let attempts = self.max_attempts.max(1);
        let mut delay = self.initial_backoff;
        let mut last_error = String::new();
        for attempt in 1..=attempts {
            match client.get(url).send() {
                Ok(resp) if resp.status().is_success() => {
                    return resp.text().map_err(|e| Error::Network {
                        attempts: attempt,
                        message: e.to_string(),
                    });
                }
                Ok(resp) if resp.status().is_server_error() => {
                    last_error = format!("HTTP status {}", resp.status().as_u16());
                }
                Ok(resp) => {
                    return Err(Error::HttpStatus {
                        status: resp.status().as_u16(),
                        url: url.to_string(),
                    });
                }
                Err(e) => last_error = e.to_string(),
            }
            log::warn!("fetch attempt {attempt}/{attempts} for {url} failed: {last_error}");
            if attempt < attempts {
                std::thread::sleep(delay);
                delay *= 2;
            }
        }
        Err(Error::Network {
            attempts,
            message: last_error,
        })
    }
}
