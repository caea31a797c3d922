//! Report structure and its three file forms.
//!
//! * `report.json`: `{meta: {config, dataset_sha256, adf}, cells: [...]}`
//! * `summary.csv`: `model,horizon,r2,rmse,mse,mae,mape`, one row per cell
//!   (metric fields empty for failed cells, `mape` empty when undefined)
//! * `trace_{model}_{horizon}.csv`: `date,actual,predicted` per successful cell
//!
//! Floats are written in shortest round-trip form.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::config::{ModelKind, ReportFormat};
use crate::error::{Error, Result};
use crate::metrics::MetricReport;
use crate::preprocess::Horizon;

pub const SUMMARY_HEADER: [&str; 7] = ["model", "horizon", "r2", "rmse", "mse", "mae", "mape"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfSummary {
    pub statistic: f64,
    pub p_value: f64,
    pub lags: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    /// Effective configuration.
    pub config: serde_json::Value,
    pub dataset_sha256: String,
    /// ADF result on the full selected series; `null` if the test could not run.
    pub adf: Option<AdfSummary>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellMetrics {
    pub r2: f64,
    pub rmse: f64,
    pub mse: f64,
    pub mae: f64,
    pub mape_percent: Option<f64>,
}

impl From<MetricReport> for CellMetrics {
    fn from(m: MetricReport) -> Self {
        Self {
            r2: m.r2,
            rmse: m.rmse,
            mse: m.mse,
            mae: m.mae,
            mape_percent: m.mape_percent,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub date: NaiveDate,
    pub actual: f64,
    pub predicted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub model: ModelKind,
    pub horizon: Horizon,
    pub status: CellStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub seed: u64,
    pub metrics: Option<CellMetrics>,
    /// Wall-clock seconds; the only field that varies between identical runs.
    pub seconds: f64,
    pub detail: serde_json::Value,
    pub trace_file: Option<String>,
    #[serde(skip)]
    pub trace: Vec<TracePoint>,
}

impl CellReport {
    pub fn trace_file_name(model: ModelKind, horizon: Horizon) -> String {
        format!("trace_{}_{}.csv", model.name(), horizon.name())
    }

    pub fn is_ok(&self) -> bool {
        self.status == CellStatus::Ok
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub meta: ReportMeta,
    pub cells: Vec<CellReport>,
}

fn float(v: f64) -> String {
    format!("{v:?}")
}

impl BenchmarkReport {
    pub fn has_failures(&self) -> bool {
        self.cells.iter().any(|c| !c.is_ok())
    }

    pub fn cell(&self, model: ModelKind, horizon: Horizon) -> Option<&CellReport> {
        self.cells.iter().find(|c| c.model == model && c.horizon == horizon)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// JSON with every `seconds` field zeroed, for run-to-run comparison.
    pub fn to_json_without_timing(&self) -> String {
        let mut copy = self.clone();
        copy.cells.iter_mut().for_each(|c| c.seconds = 0.0);
        copy.to_json()
    }

    pub fn summary_csv(&self) -> String {
        let mut out = SUMMARY_HEADER.join(",");
        out.push('\n');
        for c in &self.cells {
            let fields = match &c.metrics {
                Some(m) => [
                    float(m.r2),
                    float(m.rmse),
                    float(m.mse),
                    float(m.mae),
                    m.mape_percent.map(float).unwrap_or_default(),
                ],
                None => Default::default(),
            };
            let _ = writeln!(out, "{},{},{}", c.model.name(), c.horizon.name(), fields.join(","));
        }
        out
    }

    pub fn trace_csv(cell: &CellReport) -> String {
        let mut out = String::from("date,actual,predicted\n");
        for p in &cell.trace {
            let _ = writeln!(
                out,
                "{},{},{}",
                p.date.format("%Y-%m-%d"),
                float(p.actual),
                float(p.predicted)
            );
        }
        out
    }
}

/// Writes the requested formats into `out_dir` (created if missing) and
/// returns the written paths.
pub fn emit_report(report: &BenchmarkReport, formats: &[ReportFormat], out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();
    let mut write = |name: &str, contents: String| -> Result<()> {
        let path = out_dir.join(name);
        std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        written.push(path);
        Ok(())
    };
    if formats.contains(&ReportFormat::Json) {
        write("report.json", report.to_json())?;
    }
    if formats.contains(&ReportFormat::Csv) {
        write("summary.csv", report.summary_csv())?;
        for cell in report.cells.iter().filter(|c| c.is_ok()) {
            if let Some(name) = &cell.trace_file {
                write(name, BenchmarkReport::trace_csv(cell))?;
            }
        }
    }
    Ok(written)
}

pub fn load_report(path: &Path) -> Result<BenchmarkReport> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Serde(format!("{}: {e}", path.display())))
}
