//! `horizonbench` command-line front end.
//!
//! Exit codes: 0 on success, 1 on configuration or input errors, 2 when a
//! benchmark finished but some cells failed (the report is still written).

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use horizonbench::arma::{fit_arima, select_order};
use horizonbench::bench::{emit_report, load_config, load_report, load_table, run_benchmark};
use horizonbench::market_data::{parse_ohlcv_csv, select_column, summarize, FetchClient, PriceColumn, TimeSeriesTable};
use horizonbench::preprocess::{make_windows, MinMaxScaler};
use horizonbench::recurrent::{fit, CellKind, TrainConfig};
use horizonbench::stationarity::{adf_test, decompose};
use serde_json::json;

#[derive(Debug, Parser)]
#[command(name = "horizonbench", version, about = "Stock-price forecasting benchmark")]
struct Cli {
    /// Seed for every random choice; overrides the config file seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate an OHLCV CSV and print it in canonical form.
    Ingest {
        csv: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Download OHLCV bars from the configured HTTP endpoint.
    Fetch {
        #[arg(long)]
        symbol: String,
        #[arg(long)]
        start: chrono::NaiveDate,
        #[arg(long)]
        end: chrono::NaiveDate,
        /// Endpoint base URL; defaults to $HORIZONBENCH_DATA_URL.
        #[arg(long)]
        url: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Descriptive statistics for every numeric column.
    Summary {
        csv: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Augmented Dickey-Fuller test on one column.
    Adf {
        csv: PathBuf,
        #[command(flatten)]
        column: ColumnArg,
        #[arg(long)]
        max_lag: Option<usize>,
    },
    /// Moving-average trend/residual decomposition.
    Decompose {
        csv: PathBuf,
        #[arg(long)]
        window: usize,
        #[command(flatten)]
        column: ColumnArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit ARIMA(p,d,q); with --auto the order is an upper bound for the search.
    FitArima {
        csv: PathBuf,
        #[arg(long, value_parser = parse_order)]
        order: (usize, usize, usize),
        #[arg(long)]
        auto: bool,
        #[command(flatten)]
        column: ColumnArg,
        /// Write the fitted model as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train an LSTM or GRU on the min-max scaled column.
    TrainRnn(TrainRnnArgs),
    /// Run the models x horizons benchmark described by a config file.
    Benchmark {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Re-render a saved report.json.
    Report {
        report: PathBuf,
        #[arg(long, value_enum)]
        format: Format,
    },
}

#[derive(Debug, Args)]
struct ColumnArg {
    #[arg(long, default_value = "Close")]
    column: PriceColumn,
}

#[derive(Debug, Args)]
struct TrainRnnArgs {
    csv: PathBuf,
    #[arg(long)]
    cell: CellKind,
    #[command(flatten)]
    column: ColumnArg,
    #[arg(long, default_value_t = 30)]
    window: usize,
    #[arg(long, default_value_t = 64)]
    hidden: usize,
    #[arg(long, default_value_t = 100)]
    epochs: usize,
    #[arg(long, default_value_t = 32)]
    batch_size: usize,
    #[arg(long, default_value_t = 1e-3)]
    learning_rate: f64,
    /// Global gradient-norm clip; 0 disables clipping.
    #[arg(long, default_value_t = 5.0)]
    grad_clip: f64,
    /// Write the trained weights as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn parse_order(s: &str) -> std::result::Result<(usize, usize, usize), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [p, d, q] = parts[..] else {
        return Err(format!("expected p,d,q, got `{s}`"));
    };
    let num = |x: &str| x.parse::<usize>().map_err(|e| format!("`{x}`: {e}"));
    Ok((num(p)?, num(d)?, num(q)?))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn read_table(path: &Path) -> Result<TimeSeriesTable> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_ohlcv_csv(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => stdout(text),
    }
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn stdout(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    stdout(&(serde_json::to_string_pretty(value)? + "\n"))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Ingest { csv, out } => {
            let table = read_table(&csv)?;
            if let (Some(first), Some(last)) = (table.bars().first(), table.bars().last()) {
                eprintln!("{} rows, {} to {}", table.len(), first.date, last.date);
            }
            write_or_print(out.as_deref(), &table.to_csv())?;
        }
        Command::Fetch {
            symbol,
            start,
            end,
            url,
            out,
        } => {
            if start > end {
                bail!("--start {start} is after --end {end}");
            }
            let client = match url {
                Some(url) => FetchClient::new(url),
                None => FetchClient::from_env()?,
            };
            let table = client.fetch_ohlcv(&symbol, start, end)?;
            eprintln!("{} rows for {symbol}", table.len());
            write_or_print(out.as_deref(), &table.to_csv())?;
        }
        Command::Summary { csv, json } => {
            let stats = summarize(&read_table(&csv)?)?;
            if json {
                print_json(&serde_json::to_value(&stats)?)?;
            } else {
                let mut text = format!(
                    "{:<10} {:>6} {:>14} {:>14} {:>14} {:>14} {:>14} {:>14} {:>14}\n",
                    "column", "count", "mean", "std", "min", "25%", "50%", "75%", "max"
                );
                for c in &stats.columns {
                    text += &format!(
                        "{:<10} {:>6} {:>14.4} {:>14.4} {:>14.4} {:>14.4} {:>14.4} {:>14.4} {:>14.4}\n",
                        c.column.header(),
                        c.count,
                        c.mean,
                        c.std,
                        c.min,
                        c.q25,
                        c.q50,
                        c.q75,
                        c.max
                    );
                }
                stdout(&text)?;
            }
        }
        Command::Adf { csv, column, max_lag } => {
            let series = select_column(&read_table(&csv)?, column.column);
            let result = adf_test(&series.values, max_lag)?;
            print_json(&json!({ "column": column.column, "adf": result }))?;
        }
        Command::Decompose {
            csv,
            window,
            column,
            out,
        } => {
            let series = select_column(&read_table(&csv)?, column.column);
            write_or_print(out.as_deref(), &decompose(&series, window)?.to_csv())?;
        }
        Command::FitArima {
            csv,
            order,
            auto,
            column,
            out,
        } => {
            let series = select_column(&read_table(&csv)?, column.column);
            let (p, d, q) = order;
            let (model, selection) = if auto {
                let d_choices: Vec<usize> = (0..=d).collect();
                let sel = select_order(&series.values, p, q, &d_choices)?;
                (fit_arima(&series.values, sel.p, sel.d, sel.q)?, Some(sel))
            } else {
                (fit_arima(&series.values, p, d, q)?, None)
            };
            let wire = model.to_json();
            if let Some(path) = &out {
                let text = serde_json::to_string_pretty(&wire)? + "\n";
                std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            }
            print_json(&json!({
                "model": wire,
                "converged": model.fit.converged,
                "iterations": model.fit.iterations,
                "selection": selection,
            }))?;
        }
        Command::TrainRnn(args) => train_rnn(args, cli.seed.unwrap_or(0))?,
        Command::Benchmark { config, out_dir } => {
            let mut config = load_config(&config)?;
            if let Some(seed) = cli.seed {
                config.seed = seed;
            }
            config.validate_source()?;
            let table = load_table(&config)?;
            let report = run_benchmark(&config, &table)?;
            let dir = out_dir.unwrap_or_else(|| config.output_path());
            let written = emit_report(&report, &config.formats, &dir)?;
            for cell in &report.cells {
                match (&cell.metrics, &cell.error) {
                    (Some(m), _) => eprintln!(
                        "{:<6} {:<7} rmse {:.4} mae {:.4} r2 {:.4} ({:.1}s)",
                        cell.model.name(),
                        cell.horizon.name(),
                        m.rmse,
                        m.mae,
                        m.r2,
                        cell.seconds
                    ),
                    (None, error) => eprintln!(
                        "{:<6} {:<7} FAILED: {}",
                        cell.model.name(),
                        cell.horizon.name(),
                        error.as_deref().unwrap_or("unknown error")
                    ),
                }
            }
            eprintln!("wrote {} files to {}", written.len(), dir.display());
            if report.has_failures() {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Report { report, format } => {
            let report = load_report(&report)?;
            match format {
                Format::Csv => stdout(&report.summary_csv())?,
                Format::Json => stdout(&(report.to_json().trim_end().to_string() + "\n"))?,
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn train_rnn(args: TrainRnnArgs, seed: u64) -> Result<()> {
    if !(args.grad_clip >= 0.0) {
        bail!("--grad-clip must be non-negative, got {}", args.grad_clip);
    }
    let series = select_column(&read_table(&args.csv)?, args.column.column);
    let scaler = MinMaxScaler::fit(&series.values)?;
    let data = make_windows(&scaler.transform_all(&series.values), args.window)?;
    let cfg = TrainConfig {
        epochs: args.epochs,
        batch_size: args.batch_size,
        learning_rate: args.learning_rate,
        grad_clip_norm: (args.grad_clip > 0.0).then_some(args.grad_clip),
        seed,
        ..TrainConfig::default()
    };
    let outcome = fit(args.cell, args.hidden, &data, &cfg)?;
    if let Some(path) = &args.out {
        std::fs::write(path, outcome.network.to_json()).with_context(|| format!("writing {}", path.display()))?;
    }
    print_json(&json!({
        "cell": args.cell.name(),
        "hidden_size": args.hidden,
        "window_length": args.window,
        "seed": seed,
        "windows": data.len(),
        "adam_steps": outcome.steps,
        "final_loss": outcome.final_loss,
        "loss_history": outcome.loss_history,
        "scaler": {"lo": scaler.lo, "hi": scaler.hi},
    }))
}
