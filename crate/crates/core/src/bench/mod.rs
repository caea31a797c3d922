//! Benchmark harness: every configured model on every configured horizon,
//! evaluated by rolling one-step forecasts on the held-out tail of each slice.
//!
//! Each cell retrains from scratch with its own seed derived from the global
//! seed, so cells are independent of each other and of execution order.

mod config;
mod report;
mod runner;

pub use config::{
    load_config, ArimaSettings, ArmaSettings, BenchConfig, FetchSource, ModelKind, ReportFormat, RnnSettings,
};
pub use report::{
    emit_report, load_report, AdfSummary, BenchmarkReport, CellMetrics, CellReport, CellStatus, ReportMeta, TracePoint,
    SUMMARY_HEADER,
};
pub use runner::{cell_seed, dataset_sha256, load_table, run_benchmark};
