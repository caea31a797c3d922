//! Differencing, min-max scaling, supervised windows and horizon splits.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market_data::{select_column, PriceColumn, TimeSeriesTable};
use crate::series::Series;

/// Rows per trading year.
pub const TRADING_YEAR: usize = 252;

/// A series after `order` passes of first differencing.
///
/// `seeds[k]` is the first value of the level-`k` series, consumed by the
/// `(k+1)`-th pass; together they make the transform exactly invertible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferencedSeries {
    pub values: Vec<f64>,
    pub order: usize,
    pub seeds: Vec<f64>,
}

/// First differences of `values`.
pub fn diff_once(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Applies `d` passes of first differencing.
pub fn difference(values: &[f64], d: usize) -> Result<DifferencedSeries> {
    if values.len() <= d {
        return Err(Error::TooShort {
            needed: d + 1,
            got: values.len(),
        });
    }
    let mut current = values.to_vec();
    let mut seeds = Vec::with_capacity(d);
    for _ in 0..d {
        seeds.push(current[0]);
        current = diff_once(&current);
    }
    Ok(DifferencedSeries {
        values: current,
        order: d,
        seeds,
    })
}

/// Inverts [`difference`] by cumulative summation from the stored seeds.
pub fn integrate(diff: &DifferencedSeries) -> Result<Vec<f64>> {
    if diff.seeds.len() != diff.order {
        return Err(Error::SeedMismatch {
            order: diff.order,
            seeds: diff.seeds.len(),
        });
    }
    let mut current = diff.values.clone();
    for &seed in diff.seeds.iter().rev() {
        let mut level = Vec::with_capacity(current.len() + 1);
        let mut acc = seed;
        level.push(acc);
        for v in &current {
            acc += v;
            level.push(acc);
        }
        current = level;
    }
    Ok(current)
}

/// Affine map of a fitted `[lo, hi]` range onto `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub lo: f64,
    pub hi: f64,
}

impl MinMaxScaler {
    /// Fits on training values only; a constant input has no usable range.
    pub fn fit(train: &[f64]) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::Empty("cannot fit a scaler on no data"));
        }
        let lo = train.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = train.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(hi > lo) {
            return Err(Error::Constant("min-max scaler needs two distinct values"));
        }
        Ok(Self { lo, hi })
    }

    pub fn range(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn transform(&self, v: f64) -> f64 {
        (v - self.lo) / self.range()
    }

    pub fn inverse(&self, v: f64) -> f64 {
        v * self.range() + self.lo
    }

    pub fn transform_all(&self, values: &[f64]) -> Vec<f64> {
        values.iter().map(|&v| self.transform(v)).collect()
    }

    pub fn inverse_all(&self, values: &[f64]) -> Vec<f64> {
        values.iter().map(|&v| self.inverse(v)).collect()
    }
}

pub fn fit_minmax(train: &Series) -> Result<MinMaxScaler> {
    MinMaxScaler::fit(&train.values)
}

/// A series mapped through a scaler, keeping the scaler for inversion.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledSeries {
    pub series: Series,
    pub scaler: MinMaxScaler,
}

impl ScaledSeries {
    pub fn new(raw: &Series, scaler: MinMaxScaler) -> Self {
        Self {
            series: Series {
                name: raw.name.clone(),
                dates: raw.dates.clone(),
                values: scaler.transform_all(&raw.values),
            },
            scaler,
        }
    }
}

/// Overlapping input windows with one-step-ahead targets.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowedDataset {
    /// Row-major `num_samples × window_length`.
    inputs: Vec<f64>,
    pub targets: Vec<f64>,
    pub window_length: usize,
}

impl WindowedDataset {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn input(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.window_length..(i + 1) * self.window_length]
    }

    pub fn inputs(&self) -> impl Iterator<Item = &[f64]> {
        self.inputs.chunks_exact(self.window_length)
    }

    /// Samples `range` as a new dataset.
    pub fn subset(&self, range: std::ops::Range<usize>) -> WindowedDataset {
        let w = self.window_length;
        WindowedDataset {
            inputs: self.inputs[range.start * w..range.end * w].to_vec(),
            targets: self.targets[range].to_vec(),
            window_length: w,
        }
    }

    /// Builds a dataset from explicit samples; every input must have the same length.
    pub fn from_samples(samples: &[(Vec<f64>, f64)]) -> Result<Self> {
        let w = samples.first().map(|s| s.0.len()).unwrap_or(0);
        if w == 0 {
            return Err(Error::Empty("dataset needs at least one non-empty sample"));
        }
        let mut inputs = Vec::with_capacity(w * samples.len());
        for (x, _) in samples {
            if x.len() != w {
                return Err(Error::Shape(format!("window of length {} in a w={w} dataset", x.len())));
            }
            inputs.extend_from_slice(x);
        }
        Ok(Self {
            inputs,
            targets: samples.iter().map(|s| s.1).collect(),
            window_length: w,
        })
    }
}

/// `inputs[i] = values[i..i+w]`, `targets[i] = values[i+w]`.
pub fn make_windows(values: &[f64], w: usize) -> Result<WindowedDataset> {
    if w == 0 {
        return Err(Error::InvalidArgument("window length must be at least 1".into()));
    }
    if values.len() <= w {
        return Err(Error::TooShort {
            needed: w + 1,
            got: values.len(),
        });
    }
    let n = values.len() - w;
    let mut inputs = Vec::with_capacity(n * w);
    for i in 0..n {
        inputs.extend_from_slice(&values[i..i + w]);
    }
    Ok(WindowedDataset {
        inputs,
        targets: values[w..].to_vec(),
        window_length: w,
    })
}

/// Evaluation horizon: the most recent 1, 2.5 or 5 trading years.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Horizon {
    Short,
    Medium,
    Long,
}

impl Horizon {
    pub const ALL: [Horizon; 3] = [Horizon::Short, Horizon::Medium, Horizon::Long];

    pub fn rows(self) -> usize {
        match self {
            Horizon::Short => TRADING_YEAR,
            Horizon::Medium => TRADING_YEAR * 5 / 2,
            Horizon::Long => TRADING_YEAR * 5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Horizon::Short => "short",
            Horizon::Medium => "medium",
            Horizon::Long => "long",
        }
    }
}

impl fmt::Display for Horizon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Horizon {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "short" => Ok(Horizon::Short),
            "medium" => Ok(Horizon::Medium),
            "long" => Ok(Horizon::Long),
            other => Err(Error::InvalidArgument(format!("unknown horizon `{other}`"))),
        }
    }
}

/// Chronological train/test split of one horizon slice.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizonSplit {
    pub horizon: Horizon,
    pub train: Series,
    pub test: Series,
}

impl HorizonSplit {
    /// Train followed by test, i.e. the whole horizon slice.
    pub fn joined(&self) -> Series {
        let mut s = self.train.clone();
        s.dates.extend_from_slice(&self.test.dates);
        s.values.extend_from_slice(&self.test.values);
        s
    }
}

/// Number of training rows for a slice of `n` rows.
pub fn train_len(n: usize, train_fraction: f64) -> usize {
    // The epsilon keeps e.g. 0.8 * 10 from landing on 7.999...
    ((train_fraction * n as f64) + 1e-9).floor() as usize
}

/// Slices the most recent `horizon.rows()` points (clamped) and splits them at `train_fraction`.
pub fn split_series(series: &Series, horizon: Horizon, train_fraction: f64) -> Result<HorizonSplit> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "train_fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let n = series.len().min(horizon.rows());
    let minimum = (2.0 / (1.0 - train_fraction) - 1e-9).ceil() as usize;
    if n < minimum {
        return Err(Error::TooShort {
            needed: minimum,
            got: n,
        });
    }
    let start = series.len() - n;
    let cut = start + train_len(n, train_fraction);
    Ok(HorizonSplit {
        horizon,
        train: series.slice(start..cut),
        test: series.slice(cut..series.len()),
    })
}

pub fn horizon_split(
    table: &TimeSeriesTable,
    column: PriceColumn,
    horizon: Horizon,
    train_fraction: f64,
) -> Result<HorizonSplit> {
    split_series(&select_column(table, column), horizon, train_fraction)
}
