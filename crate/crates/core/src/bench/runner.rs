use std::time::Instant;

use rayon::prelude::*;
use serde_json::json;
use sha2::{Digest, Sha256};

use super::config::{BenchConfig, ModelKind};
use super::report::{AdfSummary, BenchmarkReport, CellReport, CellStatus, ReportMeta, TracePoint};
use crate::arma::{fit_arima, rolling_one_step, select_order};
use crate::error::{Error, Result};
use crate::market_data::{parse_ohlcv_csv, select_column, FetchClient, TimeSeriesTable};
use crate::metrics::{evaluate, mse};
use crate::preprocess::{make_windows, split_series, Horizon, HorizonSplit, MinMaxScaler};
use crate::recurrent::{fit, CellKind};
use crate::stationarity::adf_test;

/// Seed of one (model, horizon) cell: the first eight bytes, big-endian, of
/// SHA-256 over the global seed (little-endian), the model name, a zero byte
/// and the horizon name.
pub fn cell_seed(global: u64, model: ModelKind, horizon: Horizon) -> u64 {
    let mut h = Sha256::new();
    h.update(global.to_le_bytes());
    h.update(model.name().as_bytes());
    h.update([0u8]);
    h.update(horizon.name().as_bytes());
    let digest = h.finalize();
    u64::from_be_bytes(digest[..8].try_into().expect("32-byte digest"))
}

/// SHA-256 of the table's canonical CSV form, hex encoded.
pub fn dataset_sha256(table: &TimeSeriesTable) -> String {
    hex::encode(Sha256::digest(table.to_csv().as_bytes()))
}

/// Reads the configured CSV file or fetches from the configured endpoint.
pub fn load_table(config: &BenchConfig) -> Result<TimeSeriesTable> {
    if let Some(path) = config.data_path() {
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        return parse_ohlcv_csv(&text);
    }
    let source = config.fetch.as_ref().ok_or_else(|| Error::Config {
        key: "data".into(),
        message: "no data source configured".into(),
    })?;
    let client = match &source.base_url {
        Some(url) => FetchClient::new(url.clone()),
        None => FetchClient::from_env()?,
    };
    client.fetch_ohlcv(&source.symbol, source.start, source.end)
}

struct CellOutput {
    predictions: Vec<f64>,
    detail: serde_json::Value,
}

/// Trains and evaluates every (model, horizon) cell, in configured model
/// order then horizon order. Cell failures are recorded, not propagated.
pub fn run_benchmark(config: &BenchConfig, table: &TimeSeriesTable) -> Result<BenchmarkReport> {
    config.validate()?;
    let series = select_column(table, config.column);
    let adf = adf_test(&series.values, None).ok().map(|r| AdfSummary {
        statistic: r.statistic,
        p_value: r.p_value,
        lags: r.lags_used,
    });
    let meta = ReportMeta {
        config: serde_json::to_value(config).map_err(|e| Error::Serde(e.to_string()))?,
        dataset_sha256: dataset_sha256(table),
        adf,
    };

    let specs: Vec<(ModelKind, Horizon)> = config
        .models
        .iter()
        .flat_map(|&m| config.horizons.iter().map(move |&h| (m, h)))
        .collect();
    let cells = specs
        .par_iter()
        .map(|&(model, horizon)| {
            let seed = cell_seed(config.seed, model, horizon);
            let start = Instant::now();
            let outcome = split_series(&series, horizon, config.train_fraction)
                .and_then(|split| run_cell(config, model, &split, seed).map(|out| (split, out)))
                .and_then(|(split, out)| {
                    let metrics = evaluate(&out.predictions, &split.test.values)?;
                    Ok((split, out, metrics))
                });
            let seconds = start.elapsed().as_secs_f64();
            match outcome {
                Ok((split, out, metrics)) => {
                    log::info!(
                        "{model}/{} done in {seconds:.1}s: rmse {:.4}",
                        horizon.name(),
                        metrics.rmse
                    );
                    CellReport {
                        model,
                        horizon,
                        status: CellStatus::Ok,
                        error: None,
                        seed,
                        metrics: Some(metrics.into()),
                        seconds,
                        detail: out.detail,
                        trace_file: Some(CellReport::trace_file_name(model, horizon)),
                        trace: split
                            .test
                            .dates
                            .iter()
                            .zip(&split.test.values)
                            .zip(&out.predictions)
                            .map(|((&date, &actual), &predicted)| TracePoint {
                                date,
                                actual,
                                predicted,
                            })
                            .collect(),
                    }
                }
                Err(e) => {
                    log::warn!("{model}/{} failed: {e}", horizon.name());
                    CellReport {
                        model,
                        horizon,
                        status: CellStatus::Failed,
                        error: Some(e.to_string()),
                        seed,
                        metrics: None,
                        seconds,
                        detail: serde_json::Value::Null,
                        trace_file: None,
                        trace: Vec::new(),
                    }
                }
            }
        })
        .collect();
    Ok(BenchmarkReport { meta, cells })
}

fn run_cell(config: &BenchConfig, model: ModelKind, split: &HorizonSplit, seed: u64) -> Result<CellOutput> {
    let train = &split.train.values;
    let test = &split.test.values;
    match model.cell_kind() {
        Some(kind) => run_recurrent(config, kind, train, test, seed),
        None => {
            let (p_max, q_max, d_choices) = match model {
                ModelKind::Arma => (config.arma.p_max, config.arma.q_max, vec![0]),
                _ => (config.arima.p_max, config.arima.q_max, config.arima.d_choices.clone()),
            };
            run_arima(config, train, test, p_max, q_max, &d_choices)
        }
    }
}

fn run_arima(
    config: &BenchConfig,
    train: &[f64],
    test: &[f64],
    p_max: usize,
    q_max: usize,
    d_choices: &[usize],
) -> Result<CellOutput> {
    let selection = select_order(train, p_max, q_max, d_choices)?;
    let (p, d, q) = selection.order();
    let model = fit_arima(train, p, d, q)?;
    let predictions = rolling_one_step(&model, train, test)?;
    let mut detail = json!({
        "order": [p, d, q],
        "ar": model.params.ar,
        "ma": model.params.ma,
        "intercept": model.params.intercept,
        "aic": model.aic,
        "converged": model.fit.converged,
        "iterations": model.fit.iterations,
        "stationary": selection.stationary,
        "adf_by_d": selection.adf_by_d,
    });
    if config.leakage_audit {
        let n = train.len();
        audit_leakage(&joined(train, test), n, &predictions, |full| {
            rolling_one_step(&model, &full[..n], &full[n..])
        })?;
        detail["leakage_audit"] = json!("passed");
    }
    Ok(CellOutput { predictions, detail })
}

fn run_recurrent(config: &BenchConfig, kind: CellKind, train: &[f64], test: &[f64], seed: u64) -> Result<CellOutput> {
    let w = config.window_length;
    if train.len() <= w {
        return Err(Error::TooShort {
            needed: w + 1,
            got: train.len(),
        });
    }
    let settings = config.rnn(kind);
    let scaler = MinMaxScaler::fit(train)?;
    let full = joined(train, test);
    let n_train = train.len() - w;
    let test_windows = |values: &[f64]| -> Result<_> {
        let windows = make_windows(&scaler.transform_all(values), w)?;
        Ok((windows.subset(0..n_train), windows.subset(n_train..windows.len())))
    };
    let (train_set, test_set) = test_windows(&full)?;
    let cfg = settings.train_config(seed);
    let outcome = fit(kind, settings.hidden_size, &train_set, &cfg)?;
    let net = &outcome.network;
    let scaled = net.predict_all(&test_set)?;
    let predictions = scaler.inverse_all(&scaled);
    let mut detail = json!({
        "cell": kind.name(),
        "hidden_size": settings.hidden_size,
        "window_length": w,
        "epochs": settings.epochs,
        "batch_size": settings.batch_size,
        "learning_rate": settings.learning_rate,
        "grad_clip_norm": settings.grad_clip_norm,
        "train_windows": train_set.len(),
        "adam_steps": outcome.steps,
        "final_train_loss": outcome.final_loss,
        "scaled_test_mse": mse(&scaled, &test_set.targets)?,
        "scaler": {"lo": scaler.lo, "hi": scaler.hi},
    });
    if config.leakage_audit {
        audit_leakage(&full, train.len(), &predictions, |values| {
            let (_, set) = test_windows(values)?;
            Ok(scaler.inverse_all(&net.predict_all(&set)?))
        })?;
        detail["leakage_audit"] = json!("passed");
    }
    Ok(CellOutput { predictions, detail })
}

fn joined(train: &[f64], test: &[f64]) -> Vec<f64> {
    let mut v = train.to_vec();
    v.extend_from_slice(test);
    v
}

/// Corrupts every value from test index `k` on, for a few probe `k`, and
/// requires predictions `0..=k` to stay bit-identical.
fn audit_leakage(
    values: &[f64],
    n_train: usize,
    baseline: &[f64],
    predict: impl Fn(&[f64]) -> Result<Vec<f64>>,
) -> Result<()> {
    let m = baseline.len();
    let mut probes = vec![0, m / 2, m.saturating_sub(1)];
    probes.dedup();
    for k in probes {
        let mut corrupt = values.to_vec();
        for v in &mut corrupt[n_train + k..] {
            *v += 1e3 * (1.0 + v.abs());
        }
        let moved = predict(&corrupt)?;
        let same = moved[..=k]
            .iter()
            .zip(&baseline[..=k])
            .all(|(a, b)| a.to_bits() == b.to_bits());
        if !same {
            return Err(Error::InvalidArgument(format!(
                "leakage audit: a prediction before test index {k} depends on values from index {k} on"
            )));
        }
    }
    Ok(())
}
