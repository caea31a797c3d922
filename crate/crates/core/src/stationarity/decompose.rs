use crate::error::{Error, Result};
use crate::series::Series;

/// Additive split of a series into a centered moving-average trend and residual.
///
/// `trend[t]` and `residual[t]` are `None` for the first and last
/// `(window − 1) / 2` indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub original: Series,
    pub trend: Vec<Option<f64>>,
    pub residual: Vec<Option<f64>>,
    pub window: usize,
}

impl Decomposition {
    /// `index,trend,residual` rows, with empty cells where the trend is undefined.
    pub fn to_csv(&self) -> String {
        let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut out = String::from("index,trend,residual\n");
        for (i, (t, r)) in self.trend.iter().zip(&self.residual).enumerate() {
            out.push_str(&format!("{i},{},{}\n", cell(*t), cell(*r)));
        }
        out
    }

    pub fn defined_range(&self) -> std::ops::Range<usize> {
        let half = (self.window - 1) / 2;
        half..self.original.len() - half
    }
}

/// Centered moving-average decomposition.
///
/// The residual is `original − trend`. When the two lie within a factor of two
/// of each other (any positive price series smoothed this way) the subtraction
/// is exact, so `trend + residual` reproduces `original` bit for bit.
pub fn decompose(series: &Series, window: usize) -> Result<Decomposition> {
    let n = series.len();
    if window.is_multiple_of(2) || window < 3 || window > n {
        return Err(Error::InvalidArgument(format!(
            "window must be odd and within 3..={n}, got {window}"
        )));
    }
    let half = (window - 1) / 2;
    let mut trend = vec![None; n];
    let mut residual = vec![None; n];
    for t in half..n - half {
        let sum: f64 = series.values[t - half..=t + half].iter().sum();
        let m = sum / window as f64;
        trend[t] = Some(m);
        residual[t] = Some(series.values[t] - m);
    }
    Ok(Decomposition {
        original: series.clone(),
        trend,
        residual,
        window,
    })
}
