//! Benchmark configuration, read from TOML.
//!
//! ```toml
//! seed = 1                   # required
//! data = "prices.csv"        # or a [fetch] table, exactly one of the two
//! column = "Close"
//! models = ["lstm", "gru", "arma", "arima"]
//! horizons = ["short", "medium", "long"]
//! train_fraction = 0.8
//! window_length = 30
//! output_dir = "out"
//! formats = ["json", "csv"]
//! leakage_audit = false
//!
//! [fetch]
//! symbol = "AAPL"
//! start = "2019-01-01"
//! end = "2023-12-31"
//! base_url = "http://localhost:8000"   # optional, else HORIZONBENCH_DATA_URL
//!
//! [arma]
//! p_max = 3
//! q_max = 3
//!
//! [arima]
//! p_max = 3
//! q_max = 3
//! d_choices = [0, 1]
//!
//! [lstm]                     # [gru] takes the same keys
//! hidden_size = 64
//! epochs = 100
//! batch_size = 32
//! learning_rate = 0.001
//! beta1 = 0.9
//! beta2 = 0.999
//! eps_adam = 1e-8
//! grad_clip_norm = 5.0       # 0 disables clipping
//! ```
//!
//! Every key except `seed`, `models`, `horizons` and the data source has the
//! default shown. Unknown keys are rejected. Relative paths are resolved
//! against the directory holding the config file.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market_data::PriceColumn;
use crate::preprocess::Horizon;
use crate::recurrent::{CellKind, TrainConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Lstm,
    Gru,
    Arma,
    Arima,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Lstm, ModelKind::Gru, ModelKind::Arma, ModelKind::Arima];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Lstm => "lstm",
            ModelKind::Gru => "gru",
            ModelKind::Arma => "arma",
            ModelKind::Arima => "arima",
        }
    }

    pub fn cell_kind(self) -> Option<CellKind> {
        match self {
            ModelKind::Lstm => Some(CellKind::Lstm),
            ModelKind::Gru => Some(CellKind::Gru),
            _ => None,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown model '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FetchSource {
    pub symbol: String,
    pub start: NaiveDate,
    pub end: NaiveDate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_url: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ArmaSettings {
    pub p_max: usize,
    pub q_max: usize,
}

impl Default for ArmaSettings {
    fn default() -> Self {
        Self { p_max: 3, q_max: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ArimaSettings {
    pub p_max: usize,
    pub q_max: usize,
    pub d_choices: Vec<usize>,
}

impl Default for ArimaSettings {
    fn default() -> Self {
        Self {
            p_max: 3,
            q_max: 3,
            d_choices: vec![0, 1],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RnnSettings {
    pub hidden_size: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps_adam: f64,
    /// Global gradient-norm clip; 0 disables clipping.
    pub grad_clip_norm: f64,
}

impl Default for RnnSettings {
    fn default() -> Self {
        let t = TrainConfig::default();
        Self {
            hidden_size: 64,
            epochs: t.epochs,
            batch_size: t.batch_size,
            learning_rate: t.learning_rate,
            beta1: t.beta1,
            beta2: t.beta2,
            eps_adam: t.eps_adam,
            grad_clip_norm: t.grad_clip_norm.unwrap_or(0.0),
        }
    }
}

impl RnnSettings {
    pub fn train_config(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            batch_size: self.batch_size,
            learning_rate: self.learning_rate,
            beta1: self.beta1,
            beta2: self.beta2,
            eps_adam: self.eps_adam,
            grad_clip_norm: (self.grad_clip_norm > 0.0).then_some(self.grad_clip_norm),
            seed,
        }
    }
}

fn default_column() -> PriceColumn {
    PriceColumn::Close
}
fn default_fraction() -> f64 {
    0.8
}
fn default_window() -> usize {
    30
}
fn default_output() -> PathBuf {
    PathBuf::from("out")
}
fn default_formats() -> Vec<ReportFormat> {
    vec![ReportFormat::Json, ReportFormat::Csv]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
    #[serde(default = "default_column")]
    pub column: PriceColumn,
    pub models: Vec<ModelKind>,
    pub horizons: Vec<Horizon>,
    #[serde(default = "default_fraction")]
    pub train_fraction: f64,
    #[serde(default = "default_window")]
    pub window_length: usize,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<ReportFormat>,
    /// Re-runs every cell with corrupted future values and checks that no
    /// earlier prediction moves.
    #[serde(default)]
    pub leakage_audit: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fetch: Option<FetchSource>,
    #[serde(default)]
    pub arma: ArmaSettings,
    #[serde(default)]
    pub arima: ArimaSettings,
    #[serde(default)]
    pub lstm: RnnSettings,
    #[serde(default)]
    pub gru: RnnSettings,
    /// Directory relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl BenchConfig {
    /// A config with every default and no data source.
    pub fn new(seed: u64, models: Vec<ModelKind>, horizons: Vec<Horizon>) -> Self {
        Self {
            seed,
            data: None,
            column: default_column(),
            models,
            horizons,
            train_fraction: default_fraction(),
            window_length: default_window(),
            output_dir: default_output(),
            formats: default_formats(),
            leakage_audit: false,
            fetch: None,
            arma: ArmaSettings::default(),
            arima: ArimaSettings::default(),
            lstm: RnnSettings::default(),
            gru: RnnSettings::default(),
            base_dir: PathBuf::new(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config: BenchConfig = toml::from_str(text).map_err(config_error)?;
        config.validate_source()?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn rnn(&self, kind: CellKind) -> &RnnSettings {
        match kind {
            CellKind::Lstm => &self.lstm,
            CellKind::Gru => &self.gru,
        }
    }

    pub fn data_path(&self) -> Option<PathBuf> {
        self.data.as_ref().map(|p| self.base_dir.join(p))
    }

    pub fn output_path(&self) -> PathBuf {
        self.base_dir.join(&self.output_dir)
    }

    /// Requires exactly one data source.
    pub fn validate_source(&self) -> Result<()> {
        let bad = |key: &str, message: &str| {
            Err(Error::Config {
                key: key.into(),
                message: message.into(),
            })
        };
        if self.data.is_some() == self.fetch.is_some() {
            return bad("data", "set exactly one of `data` and `[fetch]`");
        }
        if let Some(f) = &self.fetch {
            if f.end < f.start {
                return bad("fetch.end", "must not precede fetch.start");
            }
        }
        Ok(())
    }

    /// Checks every setting except the data source.
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, message: String| {
            Err(Error::Config {
                key: key.into(),
                message,
            })
        };
        if self.models.is_empty() {
            return bad("models", "at least one model is required".into());
        }
        if self.horizons.is_empty() {
            return bad("horizons", "at least one horizon is required".into());
        }
        for (key, list) in [("models", dup(&self.models)), ("horizons", dup(&self.horizons))] {
            if let Some(d) = list {
                return bad(key, format!("{d} is listed twice"));
            }
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return bad("train_fraction", format!("{} is outside (0, 1)", self.train_fraction));
        }
        if self.window_length == 0 {
            return bad("window_length", "must be at least 1".into());
        }
        if self.formats.is_empty() {
            return bad("formats", "at least one report format is required".into());
        }
        if self.arima.d_choices.is_empty() {
            return bad("arima.d_choices", "must not be empty".into());
        }
        for kind in [CellKind::Lstm, CellKind::Gru] {
            let s = self.rnn(kind);
            if s.hidden_size == 0 {
                return bad(&format!("{kind}.hidden_size"), "must be at least 1".into());
            }
            if !(s.grad_clip_norm >= 0.0) {
                return bad(&format!("{kind}.grad_clip_norm"), "must be non-negative".into());
            }
            if let Err(Error::Config { key, message }) = s.train_config(self.seed).validate() {
                return bad(&format!("{kind}.{key}"), message);
            }
        }
        Ok(())
    }
}

fn dup<T: PartialEq + fmt::Debug>(items: &[T]) -> Option<String> {
    items
        .iter()
        .enumerate()
        .find(|(i, a)| items[..*i].contains(a))
        .map(|(_, a)| format!("{a:?}").to_lowercase())
}

fn config_error(e: toml::de::Error) -> Error {
    let message = e.message().to_string();
    let key = message
        .strip_prefix("unknown field `")
        .and_then(|rest| rest.split('`').next())
        .map(str::to_string)
        .or_else(|| {
            message
                .strip_prefix("missing field `")
                .and_then(|r| r.split('`').next())
                .map(str::to_string)
        })
        .unwrap_or_else(|| match e.span() {
            Some(span) => format!("byte {}", span.start),
            None => "<root>".into(),
        });
    Error::Config { key, message }
}

/// Reads and validates a config file, recording its directory for relative paths.
pub fn load_config(path: &Path) -> Result<BenchConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut config = BenchConfig::from_toml(&text)?;
    config.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(config)
}
