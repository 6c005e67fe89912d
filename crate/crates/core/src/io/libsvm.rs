//! LIBSVM sparse data files: `<label> <index>:<value> ...`, 1-based,
//! strictly ascending indices.

use std::io::{BufRead, Write};

use crate::dataset::{Dataset, Label, LabelMap};
use crate::error::{Error, Result};
use crate::io::format::format_real;
use crate::matrix::FeatureMatrix;

/// A parsed data file before label mapping and densification.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawData {
    /// Canonical label text (the label's numeric value printed back).
    pub labels: Vec<String>,
    /// Sparse rows as `(zero-based feature, value)` pairs.
    pub rows: Vec<Vec<(usize, f64)>>,
    pub num_features: usize,
    /// Source line of every row, for diagnostics.
    pub lines: Vec<usize>,
}

impl RawData {
    pub fn from_dense<L: AsRef<str>>(labels: &[L], rows: &[Vec<f64>]) -> Self {
        let num_features = rows.iter().map(Vec::len).max().unwrap_or(0);
        Self {
            labels: labels.iter().map(|l| l.as_ref().to_string()).collect(),
            rows: rows
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|(_, &v)| v != 0.0)
                        .map(|(j, &v)| (j, v))
                        .collect()
                })
                .collect(),
            num_features,
            lines: (1..=rows.len()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Dense rows of exactly `num_features` entries.
    pub fn dense_rows(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| {
                let mut dense = vec![0.0; self.num_features];
                for &(j, v) in r {
                    dense[j] = v;
                }
                dense
            })
            .collect()
    }

    /// Builds a two-class dataset with the first-seen label rule.
    pub fn into_dataset(&self, row_block: usize, feature_block: usize) -> Result<Dataset> {
        if self.rows.is_empty() {
            return Err(Error::EmptyData("no data records".into()));
        }
        if self.num_features == 0 {
            return Err(Error::EmptyData("no features in any record".into()));
        }
        let mut positive: Option<&str> = None;
        let mut negative: Option<&str> = None;
        let mut labels = Vec::with_capacity(self.labels.len());
        for (k, l) in self.labels.iter().enumerate() {
            let l = l.as_str();
            let label = if positive.is_none_or(|p| p == l) {
                positive = Some(l);
                Label::Positive
            } else if negative.is_none_or(|n| n == l) {
                negative = Some(l);
                Label::Negative
            } else {
                return Err(Error::Parse {
                    line: self.lines[k],
                    message: format!("more than two distinct labels (third label {l})"),
                });
            };
            labels.push(label);
        }
        let (Some(positive), Some(negative)) = (positive, negative) else {
            return Err(Error::MalformedData(
                "fewer than two distinct labels".into(),
            ));
        };
        let mut features =
            FeatureMatrix::zeros(self.rows.len(), self.num_features, row_block, feature_block)?;
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                features.set(i, j, v);
            }
        }
        Dataset::new(features, labels, LabelMap::new(positive, negative))
    }
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_number(token: &str, line: usize, what: &str) -> Result<f64> {
    match token.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(parse_error(line, format!("non-numeric {what} {token:?}"))),
    }
}

/// Canonical spelling of a label: its numeric value, printed back.
pub fn canonical_label(token: &str, line: usize) -> Result<String> {
    Ok(format_real(parse_number(token, line, "label")?))
}

/// Reads records without any label-count checks.
pub fn parse_libsvm_raw<R: BufRead>(reader: R) -> Result<RawData> {
    let mut data = RawData::default();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let label = canonical_label(tokens.next().expect("non-empty line"), line_no)?;
        let mut row = Vec::new();
        let mut previous = 0usize;
        for token in tokens {
            let (index, value) = token
                .split_once(':')
                .ok_or_else(|| parse_error(line_no, format!("expected <index>:<value>, got {token:?}")))?;
            let index: i64 = index
                .parse()
                .map_err(|_| parse_error(line_no, format!("non-numeric index {index:?}")))?;
            if index < 1 {
                return Err(parse_error(line_no, format!("index {index} is below 1")));
            }
            let index = index as usize;
            if index <= previous {
                return Err(parse_error(line_no, "indices must be ascending"));
            }
            previous = index;
            let value = parse_number(value, line_no, "value")?;
            row.push((index - 1, value));
        }
        data.num_features = data.num_features.max(previous);
        data.labels.push(label);
        data.rows.push(row);
        data.lines.push(line_no);
    }
    Ok(data)
}

/// Reads a two-class training set.
pub fn parse_libsvm<R: BufRead>(reader: R, row_block: usize, feature_block: usize) -> Result<Dataset> {
    parse_libsvm_raw(reader)?.into_dataset(row_block, feature_block)
}

/// Writes records, omitting zero features.
pub fn write_libsvm_raw<W: Write>(data: &RawData, mut out: W) -> Result<()> {
    for (label, row) in data.labels.iter().zip(&data.rows) {
        out.write_all(label.as_bytes())?;
        for &(j, v) in row {
            if v != 0.0 {
                write!(out, " {}:{}", j + 1, format_real(v))?;
            }
        }
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn dataset_to_raw(dataset: &Dataset) -> RawData {
    RawData::from_dense(&dataset.original_labels(), &dataset.features().to_rows())
}

pub fn write_libsvm<W: Write>(dataset: &Dataset, out: W) -> Result<()> {
    write_libsvm_raw(&dataset_to_raw(dataset), out)
}
