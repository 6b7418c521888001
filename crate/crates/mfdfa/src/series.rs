//! Price/return data model, CSV ingestion, and the elementary statistics
//! shared by all other modules.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// An ordered sequence of strictly positive prices, optionally with
/// per-observation labels (dates).
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    values: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl PriceSeries {
    /// Validates that every price is strictly positive and finite and that
    /// there are at least two observations.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::TooShort {
                len: values.len(),
                min: 2,
            });
        }
        for (index, &value) in values.iter().enumerate() {
            if value <= 0.0 || !value.is_finite() {
                return Err(Error::NonPositivePrice { index, value });
            }
        }
        Ok(Self {
            values,
            labels: None,
        })
    }

    pub fn with_labels(values: Vec<f64>, labels: Vec<String>) -> Result<Self> {
        if labels.len() != values.len() {
            return Err(Error::LengthMismatch {
                expected: values.len(),
                got: labels.len(),
            });
        }
        let mut series = Self::new(values)?;
        series.labels = Some(labels);
        Ok(series)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A finite sequence of real-valued returns with cached sample mean and
/// sample standard deviation (N−1 denominator).
///
/// Immutable after construction; safe to share across threads.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReturnSeries {
    values: Vec<f64>,
    mean: f64,
    std: f64,
}

impl ReturnSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::TooShort { len: 0, min: 1 });
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "return series contains a non-finite value: {bad}"
            )));
        }
        let (mean, std) = sample_stats(&values);
        Ok(Self { values, mean, std })
    }

    /// Constructor for transformations that provably preserve the value
    /// multiset (shuffles, rank replacements): carries the cached statistics
    /// over instead of re-accumulating them in a different order.
    pub(crate) fn with_stats(values: Vec<f64>, mean: f64, std: f64) -> Self {
        Self { values, mean, std }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn std(&self) -> f64 {
        self.std
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Sample mean and standard deviation with the N−1 denominator; a single
/// observation has standard deviation zero.
pub(crate) fn sample_stats(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

/// Logarithmic returns r(t) = ln[P(t)/P(t−1)].
///
/// Output length is the input length minus one; positivity of the prices is
/// guaranteed by [`PriceSeries`], so the logs are always finite.
pub fn log_returns(prices: &PriceSeries) -> ReturnSeries {
    let p = prices.values();
    let returns: Vec<f64> = p.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
    ReturnSeries::new(returns).expect("PriceSeries guarantees at least one finite return")
}

/// Selects the price column of a CSV file by zero-based index or header name.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnSelector {
    Index(usize),
    Name(String),
}

impl std::str::FromStr for ColumnSelector {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(index) => ColumnSelector::Index(index),
            Err(_) => ColumnSelector::Name(s.to_string()),
        })
    }
}

/// Reads a price series from a CSV file.
///
/// The delimiter (comma or semicolon) and the presence of a header row are
/// sniffed from the first line; blank lines are skipped. Cell errors are
/// reported with their 1-based row number.
pub fn ingest_csv(path: &Path, column: &ColumnSelector) -> Result<PriceSeries> {
    let raw = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;

    let first_line = raw.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    let delimiter = sniff_delimiter(first_line);

    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(false)
        .flexible(true)
        .from_reader(raw.as_bytes());

    let mut price_idx: Option<usize> = None;
    let mut label_idx: Option<usize> = None;
    let mut values = Vec::new();
    let mut labels = Vec::new();

    for record in reader.records() {
        let record = record?;
        let row = record.position().map_or(0, |p| p.line());
        if record.iter().all(|cell| cell.trim().is_empty()) {
            continue;
        }

        let idx = match price_idx {
            Some(idx) => idx,
            None => {
                // First non-empty record: resolve the column and decide
                // whether this row is a header.
                let (idx, is_header) = resolve_column(&record, column, row)?;
                price_idx = Some(idx);
                label_idx = (record.len() > 1).then_some(if idx == 0 { 1 } else { 0 });
                if is_header {
                    continue;
                }
                idx
            }
        };

        let cell = record
            .get(idx)
            .ok_or(Error::MissingColumn { index: idx, row })?
            .trim();
        let value: f64 = cell.parse().map_err(|_| Error::BadCell {
            row,
            cell: cell.to_string(),
        })?;
        if value <= 0.0 || !value.is_finite() {
            return Err(Error::NonPositiveCell { row, value });
        }
        values.push(value);
        if let Some(li) = label_idx {
            labels.push(record.get(li).unwrap_or("").trim().to_string());
        }
    }

    if values.is_empty() {
        return Err(Error::EmptyColumn);
    }
    if values.len() < 2 {
        return Err(Error::TooShort {
            len: values.len(),
            min: 2,
        });
    }
    match label_idx {
        Some(_) => PriceSeries::with_labels(values, labels),
        None => PriceSeries::new(values),
    }
}

fn sniff_delimiter(line: &str) -> u8 {
    let semicolons = line.matches(';').count();
    let commas = line.matches(',').count();
    if semicolons > commas {
        b';'
    } else {
        b','
    }
}

/// Returns the resolved price column index and whether the first record is a
/// header row.
fn resolve_column(
    record: &csv::StringRecord,
    column: &ColumnSelector,
    row: u64,
) -> Result<(usize, bool)> {
    match column {
        ColumnSelector::Name(name) => {
            let idx = record
                .iter()
                .position(|cell| cell.trim().eq_ignore_ascii_case(name))
                .ok_or_else(|| Error::UnknownColumn {
                    column: name.clone(),
                })?;
            Ok((idx, true))
        }
        ColumnSelector::Index(idx) => {
            let cell = record
                .get(*idx)
                .ok_or(Error::MissingColumn { index: *idx, row })?;
            let is_header = cell.trim().parse::<f64>().is_err();
            Ok((*idx, is_header))
        }
    }
}
