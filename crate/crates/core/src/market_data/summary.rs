use serde::{Deserialize, Serialize};

use super::{PriceColumn, TimeSeriesTable};
use crate::error::{Error, Result};

/// Descriptive statistics for one column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSummary {
    pub column: PriceColumn,
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for a single row.
    pub std: f64,
    pub min: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub columns: Vec<ColumnSummary>,
    /// Set when the table has one row and the standard deviation is undefined.
    pub degenerate_std: bool,
}

impl SummaryStats {
    pub fn column(&self, column: PriceColumn) -> &ColumnSummary {
        self.columns
            .iter()
            .find(|c| c.column == column)
            .expect("every column is summarized")
    }
}

/// Quantile by linear interpolation between order statistics of sorted data.
pub(crate) fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

pub fn summarize(table: &TimeSeriesTable) -> Result<SummaryStats> {
    if table.is_empty() {
        return Err(Error::Empty("cannot summarize an empty table"));
    }
    let n = table.len();
    let columns = PriceColumn::ALL
        .iter()
        .map(|&column| {
            let mut values: Vec<f64> = table.bars().iter().map(|b| b.get(column)).collect();
            let mean = values.iter().sum::<f64>() / n as f64;
            let std = if n > 1 {
                let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
                (ss / (n - 1) as f64).sqrt()
            } else {
                0.0
            };
            values.sort_by(f64::total_cmp);
            ColumnSummary {
                column,
                count: n,
                mean,
                std,
                min: values[0],
                q25: quantile_sorted(&values, 0.25),
                q50: quantile_sorted(&values, 0.50),
                q75: quantile_sorted(&values, 0.75),
                max: values[n - 1],
            }
        })
        .collect();
    Ok(SummaryStats {
        columns,
        degenerate_std: n == 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market_data::{parse_ohlcv_csv, OhlcvBar};
    use approx::assert_relative_eq;
    use chrono::NaiveDate;

    const FIXTURE: &str = include_str!("../../tests/data/table1.csv");

    #[test]
    fn fixture_summary() {
        let s = summarize(&parse_ohlcv_csv(FIXTURE).unwrap()).unwrap();
        assert!(s.columns.iter().all(|c| c.count == 38));
        assert_eq!(s.column(PriceColumn::High).max, 19.02);
        // Reference values from an independent dataframe `describe()` pass over the rows.
        let close = s.column(PriceColumn::Close);
        assert_relative_eq!(close.mean, 17.0601447368421, max_relative = 1e-13);
        assert_relative_eq!(close.std, 0.873171606828549, max_relative = 1e-12);
        assert_relative_eq!(close.q25, 16.421025, max_relative = 1e-12);
        assert_relative_eq!(close.q50, 16.865, max_relative = 1e-12);
        assert_relative_eq!(close.q75, 18.02, max_relative = 1e-12);
        assert_eq!(close.min, 15.8);
        let vol = s.column(PriceColumn::Volume);
        assert_eq!((vol.q25, vol.q50, vol.q75), (4908.75, 10466.0, 16269.25));
        assert!(!s.degenerate_std);
    }

    #[test]
    fn single_row_is_flagged() {
        let bar = OhlcvBar {
            date: NaiveDate::from_ymd_opt(2020, 1, 2).unwrap(),
            open: 2.0,
            high: 3.0,
            low: 1.0,
            close: 2.5,
            adj_close: 2.5,
            volume: 10,
        };
        let t = TimeSeriesTable::from_bars("X", vec![bar]).unwrap();
        let s = summarize(&t).unwrap();
        let c = s.column(PriceColumn::Close);
        assert_eq!((c.mean, c.min, c.max, c.q50, c.std), (2.5, 2.5, 2.5, 2.5, 0.0));
        assert!(s.degenerate_std);
    }

    #[test]
    fn empty_table_errors() {
        let t = TimeSeriesTable::from_bars("X", vec![]).unwrap();
        assert!(matches!(summarize(&t), Err(Error::Empty(_))));
    }
}
