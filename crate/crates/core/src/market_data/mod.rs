//! Daily OHLCV price tables: CSV ingestion, HTTP fetch, summaries and column selection.
//!
//! The CSV schema is the usual Yahoo-style export:
//!
//! ```text
//! Date,Open,High,Low,Close,Adj Close,Volume
//! 2019-01-02 00:00:00,16.4,16.5,16.19,16.5,7.778549,5133
//! ```
//!
//! Column order and header case are free. Dates may carry a `HH:MM:SS` suffix,
//! which is discarded. Rows are sorted by date after parsing and every row is
//! checked against the bar invariants; a bad row rejects the whole document.

mod fetch;
mod summary;

use std::fmt;
use std::str::FromStr;

use chrono::{NaiveDate, NaiveDateTime};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::Series;

pub use fetch::{FetchClient, DATA_URL_ENV};
pub use summary::{summarize, ColumnSummary, SummaryStats};

/// One trading day.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OhlcvBar {
    pub date: NaiveDate,
    pub open: f64,
    pub high: f64,
    pub low: f64,
    pub close: f64,
    pub adj_close: f64,
    pub volume: u64,
}

impl OhlcvBar {
    /// Checks the price-ordering invariants, returning a description of the first violation.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let prices = [
            ("Open", self.open),
            ("High", self.high),
            ("Low", self.low),
            ("Close", self.close),
            ("Adj Close", self.adj_close),
        ];
        for (name, v) in prices {
            if !v.is_finite() || v <= 0.0 {
                return Err(format!("{name} must be a positive finite price, got {v}"));
            }
        }
        if self.low > self.high {
            return Err(format!("Low {} above High {}", self.low, self.high));
        }
        if self.low > self.open.min(self.close) {
            return Err(format!(
                "Low {} above min(Open, Close) {}",
                self.low,
                self.open.min(self.close)
            ));
        }
        if self.high < self.open.max(self.close) {
            return Err(format!(
                "High {} below max(Open, Close) {}",
                self.high,
                self.open.max(self.close)
            ));
        }
        Ok(())
    }

    pub fn get(&self, column: PriceColumn) -> f64 {
        match column {
            PriceColumn::Open => self.open,
            PriceColumn::High => self.high,
            PriceColumn::Low => self.low,
            PriceColumn::Close => self.close,
            PriceColumn::AdjClose => self.adj_close,
            PriceColumn::Volume => self.volume as f64,
        }
    }
}

/// The six numeric columns of a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum PriceColumn {
    Open,
    High,
    Low,
    Close,
    AdjClose,
    Volume,
}

impl PriceColumn {
    pub const ALL: [PriceColumn; 6] = [
        PriceColumn::Open,
        PriceColumn::High,
        PriceColumn::Low,
        PriceColumn::Close,
        PriceColumn::AdjClose,
        PriceColumn::Volume,
    ];

    /// Header spelling used in CSV documents.
    pub fn header(self) -> &'static str {
        match self {
            PriceColumn::Open => "Open",
            PriceColumn::High => "High",
            PriceColumn::Low => "Low",
            PriceColumn::Close => "Close",
            PriceColumn::AdjClose => "Adj Close",
            PriceColumn::Volume => "Volume",
        }
    }
}

impl fmt::Display for PriceColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.header())
    }
}

impl FromStr for PriceColumn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        match key.as_str() {
            "open" => Ok(PriceColumn::Open),
            "high" => Ok(PriceColumn::High),
            "low" => Ok(PriceColumn::Low),
            "close" => Ok(PriceColumn::Close),
            "adjclose" => Ok(PriceColumn::AdjClose),
            "volume" => Ok(PriceColumn::Volume),
            _ => Err(Error::UnknownColumn(s.to_string())),
        }
    }
}

impl TryFrom<String> for PriceColumn {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PriceColumn> for String {
    fn from(c: PriceColumn) -> String {
        c.header().to_string()
    }
}

/// Dated bars for one symbol, strictly increasing by date.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesTable {
    pub symbol: String,
    bars: Vec<OhlcvBar>,
}

impl TimeSeriesTable {
    /// Sorts the bars and validates every invariant. `rows[i]` is reported as
    /// the source line number on failure.
    pub fn from_bars(symbol: impl Into<String>, bars: Vec<OhlcvBar>) -> Result<Self> {
        let numbered: Vec<(usize, OhlcvBar)> = bars.into_iter().enumerate().map(|(i, b)| (i + 2, b)).collect();
        Self::from_numbered(symbol.into(), numbered)
    }

    fn from_numbered(symbol: String, mut rows: Vec<(usize, OhlcvBar)>) -> Result<Self> {
        for (row, bar) in &rows {
            bar.validate()
                .map_err(|message| Error::InvalidRow { row: *row, message })?;
        }
        rows.sort_by_key(|(_, b)| b.date);
        if let Some(w) = rows.windows(2).find(|w| w[0].1.date == w[1].1.date) {
            let row = w[0].0.max(w[1].0);
            return Err(Error::DuplicateDate { row, date: w[1].1.date });
        }
        Ok(Self {
            symbol,
            bars: rows.into_iter().map(|(_, b)| b).collect(),
        })
    }

    pub fn bars(&self) -> &[OhlcvBar] {
        &self.bars
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    pub fn dates(&self) -> Vec<NaiveDate> {
        self.bars.iter().map(|b| b.date).collect()
    }

    /// The most recent `n` bars (or all of them when fewer exist).
    pub fn tail(&self, n: usize) -> TimeSeriesTable {
        let start = self.bars.len().saturating_sub(n);
        TimeSeriesTable {
            symbol: self.symbol.clone(),
            bars: self.bars[start..].to_vec(),
        }
    }

    /// Canonical CSV rendering: fixed header order, `YYYY-MM-DD` dates and
    /// shortest round-trip number formatting. Re-parsing yields an identical table.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("Date,Open,High,Low,Close,Adj Close,Volume\n");
        for b in &self.bars {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                b.date.format("%Y-%m-%d"),
                b.open,
                b.high,
                b.low,
                b.close,
                b.adj_close,
                b.volume
            ));
        }
        out
    }
}

const DATE_HEADER: &str = "date";

fn normalize_header(h: &str) -> String {
    h.chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

pub(crate) fn parse_date(raw: &str) -> Option<NaiveDate> {
    let raw = raw.trim();
    NaiveDate::parse_from_str(raw, "%Y-%m-%d").ok().or_else(|| {
        NaiveDateTime::parse_from_str(raw, "%Y-%m-%d %H:%M:%S")
            .ok()
            .map(|dt| dt.date())
    })
}

fn parse_volume(raw: &str) -> Option<u64> {
    let raw = raw.trim();
    if let Ok(v) = raw.parse::<u64>() {
        return Some(v);
    }
    // Some exports write volumes as `5133.0`.
    let v: f64 = raw.parse().ok()?;
    (v.is_finite() && v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64).then_some(v as u64)
}

/// Parses an OHLCV CSV document into a validated, date-sorted table.
///
/// Errors carry the 1-based source line (the header is line 1).
pub fn parse_ohlcv_csv(text: &str) -> Result<TimeSeriesTable> {
    parse_ohlcv_csv_for(text, "")
}

/// Like [`parse_ohlcv_csv`], tagging the table with `symbol`.
pub fn parse_ohlcv_csv_for(text: &str, symbol: &str) -> Result<TimeSeriesTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let headers = reader.headers().map_err(|e| Error::Csv(e.to_string()))?;
    let normalized: Vec<String> = headers.iter().map(normalize_header).collect();
    let find = |name: &str, display: &str| -> Result<usize> {
        normalized
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(display.to_string()))
    };
    let date_idx = find(DATE_HEADER, "Date")?;
    let mut idx = [0usize; 6];
    for (slot, col) in idx.iter_mut().zip(PriceColumn::ALL) {
        *slot = find(&normalize_header(col.header()), col.header())?;
    }

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::InvalidRow {
            row: line,
            message: e.to_string(),
        })?;
        let field = |j: usize| record.get(j).unwrap_or("");
        let date = parse_date(field(date_idx)).ok_or_else(|| Error::InvalidRow {
            row: line,
            message: format!("unparseable date `{}`", field(date_idx)),
        })?;
        let mut prices = [0.0f64; 5];
        for (k, p) in prices.iter_mut().enumerate() {
            let raw = field(idx[k]);
            *p = raw.parse().map_err(|_| Error::InvalidRow {
                row: line,
                message: format!("unparseable {} `{raw}`", PriceColumn::ALL[k]),
            })?;
        }
        let raw_volume = field(idx[5]);
        let volume = parse_volume(raw_volume).ok_or_else(|| Error::InvalidRow {
            row: line,
            message: format!("unparseable Volume `{raw_volume}`"),
        })?;
        rows.push((
            line,
            OhlcvBar {
                date,
                open: prices[0],
                high: prices[1],
                low: prices[2],
                close: prices[3],
                adj_close: prices[4],
                volume,
            },
        ));
    }
    TimeSeriesTable::from_numbered(symbol.to_string(), rows)
}

/// Extracts one numeric column as a date-indexed series.
pub fn select_series(table: &TimeSeriesTable, column: &str) -> Result<Series> {
    let column: PriceColumn = column.parse()?;
    Ok(select_column(table, column))
}

pub fn select_column(table: &TimeSeriesTable, column: PriceColumn) -> Series {
    Series {
        name: column.header().to_string(),
        dates: table.dates(),
        values: table.bars.iter().map(|b| b.get(column)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: &str = include_str!("../../tests/data/table1.csv");

    #[test]
    fn parses_fixture() {
        let t = parse_ohlcv_csv(FIXTURE).unwrap();
        assert_eq!(t.len(), 38);
        assert_eq!(t.bars()[0].close, 16.5);
        assert_eq!(t.bars()[37].close, 18.3899);
        let feb12 = t
            .bars()
            .iter()
            .find(|b| b.date == NaiveDate::from_ymd_opt(2019, 2, 12).unwrap())
            .unwrap();
        assert_eq!(feb12.high, 19.02);
        assert_eq!(feb12.volume, 25820);
    }

    #[test]
    fn header_only_is_empty_table() {
        let t = parse_ohlcv_csv("Date,Open,High,Low,Close,Adj Close,Volume\n").unwrap();
        assert!(t.is_empty());
    }

    #[test]
    fn header_is_case_and_order_insensitive() {
        let doc = "volume,adj close,CLOSE,low,High,open,date\n100,1.5,2,1,3,2,2020-01-02\n";
        let t = parse_ohlcv_csv(doc).unwrap();
        let b = t.bars()[0];
        assert_eq!(
            (b.open, b.high, b.low, b.close, b.adj_close, b.volume),
            (2.0, 3.0, 1.0, 2.0, 1.5, 100)
        );
    }

    #[test]
    fn unsorted_rows_are_sorted() {
        let doc = "Date,Open,High,Low,Close,Adj Close,Volume\n\
                   2020-01-03,2,2,2,2,2,1\n\
                   2020-01-02,1,1,1,1,1,1\n";
        let t = parse_ohlcv_csv(doc).unwrap();
        assert_eq!(t.bars()[0].close, 1.0);
    }

    #[test]
    fn missing_column_is_named() {
        let err = parse_ohlcv_csv("Date,Open,High,Low,Close,Volume\n").unwrap_err();
        assert!(matches!(err, Error::MissingColumn(ref c) if c == "Adj Close"), "{err}");
    }

    #[test]
    fn bad_rows_report_their_line() {
        let head = "Date,Open,High,Low,Close,Adj Close,Volume\n2020-01-02,1,1,1,1,1,1\n";
        let cases = [
            "2020-13-40,1,1,1,1,1,1\n",
            "2020-01-03,1,x,1,1,1,1\n",
            "2020-01-03,1,1,1,1,1,-4\n",
            "2020-01-03,1,1,1.5,1,1,1\n",
            "2020-01-03,1,0.5,0.4,1,1,1\n",
            "2020-01-03,-1,1,-2,1,1,1\n",
        ];
        for case in cases {
            let err = parse_ohlcv_csv(&format!("{head}{case}")).unwrap_err();
            assert!(matches!(err, Error::InvalidRow { row: 3, .. }), "{case}: {err}");
        }
        let dup = parse_ohlcv_csv(&format!("{head}2020-01-02,1,1,1,1,1,1\n")).unwrap_err();
        assert!(matches!(dup, Error::DuplicateDate { row: 3, .. }), "{dup}");
    }

    #[test]
    fn select_columns() {
        let t = parse_ohlcv_csv(FIXTURE).unwrap();
        let close = select_series(&t, "Close").unwrap();
        assert_eq!(close.len(), 38);
        assert_eq!(close.values[0], 16.5);
        assert_eq!(close.dates, t.dates());
        let vol = select_series(&t, "Volume").unwrap();
        assert_eq!(vol.values[0], 5133.0);
        assert!(vol.values.iter().all(|v| v.fract() == 0.0));
        assert!(matches!(select_series(&t, "Typo"), Err(Error::UnknownColumn(_))));
    }

    #[test]
    fn csv_roundtrip_is_identity() {
        let t = parse_ohlcv_csv(FIXTURE).unwrap();
        let again = parse_ohlcv_csv(&t.to_csv()).unwrap();
        assert_eq!(t, again);
        assert_eq!(again.to_csv(), t.to_csv());
    }
}
