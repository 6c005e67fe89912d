//! Per-feature affine scaling to a target interval.
//!
//! Range files hold the target interval on the first line, then one
//! `min max` pair per feature.

use std::io::{BufRead, Write};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::io::format::format_real;

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingParams {
    pub lo: f64,
    pub hi: f64,
    /// Observed `(min, max)` per feature.
    pub ranges: Vec<(f64, f64)>,
}

fn check_interval(lo: f64, hi: f64) -> Result<()> {
    if lo < hi && lo.is_finite() && hi.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidRange { lo, hi })
    }
}

impl ScalingParams {
    /// Observes per-feature ranges over dense rows.
    pub fn fit_rows(rows: &[Vec<f64>], num_features: usize, lo: f64, hi: f64) -> Result<Self> {
        check_interval(lo, hi)?;
        let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); num_features];
        for row in rows {
            for (r, &v) in ranges.iter_mut().zip(row) {
                r.0 = r.0.min(v);
                r.1 = r.1.max(v);
            }
        }
        for r in &mut ranges {
            if r.0 > r.1 {
                *r = (0.0, 0.0);
            }
        }
        Ok(Self { lo, hi, ranges })
    }

    pub fn scale_value(&self, feature: usize, value: f64) -> f64 {
        let (min, max) = self.ranges[feature];
        if max == min {
            self.lo
        } else {
            self.lo + (self.hi - self.lo) * (value - min) / (max - min)
        }
    }

    /// Scales dense rows in place. Rows may be shorter than the range
    /// table, never longer.
    pub fn apply_rows(&self, rows: &mut [Vec<f64>]) -> Result<()> {
        for row in rows.iter_mut() {
            if row.len() > self.ranges.len() {
                return Err(Error::Shape {
                    expected: self.ranges.len(),
                    actual: row.len(),
                });
            }
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.scale_value(j, *v);
            }
        }
        Ok(())
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{} {}", format_real(self.lo), format_real(self.hi))?;
        for &(min, max) in &self.ranges {
            writeln!(out, "{} {}", format_real(min), format_real(max))?;
        }
        Ok(())
    }

    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut pairs = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.is_empty() {
                continue;
            }
            let parsed = match fields.as_slice() {
                [a, b] => a.parse::<f64>().ok().zip(b.parse::<f64>().ok()),
                _ => None,
            };
            let pair = parsed.ok_or_else(|| Error::Parse {
                line: idx + 1,
                message: "expected two numbers".into(),
            })?;
            pairs.push(pair);
        }
        let Some((&(lo, hi), ranges)) = pairs.split_first() else {
            return Err(Error::EmptyData("range file is empty".into()));
        };
        check_interval(lo, hi)?;
        Ok(Self {
            lo,
            hi,
            ranges: ranges.to_vec(),
        })
    }
}

pub fn fit_scaling(dataset: &Dataset, lo: f64, hi: f64) -> Result<ScalingParams> {
    ScalingParams::fit_rows(&dataset.features().to_rows(), dataset.num_features(), lo, hi)
}

pub fn apply_scaling(dataset: &Dataset, params: &ScalingParams) -> Result<Dataset> {
    let mut rows = dataset.features().to_rows();
    params.apply_rows(&mut rows)?;
    let features = crate::matrix::build_feature_matrix(
        &rows,
        dataset.features().row_block(),
        dataset.features().feature_block(),
    )?;
    dataset.with_features(features)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn column(values: &[f64]) -> Dataset {
        let pts: Vec<Vec<f64>> = values.iter().map(|&v| vec![v]).collect();
        let labels: Vec<&str> = (0..values.len()).map(|i| if i % 2 == 0 { "1" } else { "-1" }).collect();
        Dataset::from_labeled_points(&pts, &labels, 1, 1).unwrap()
    }

    #[test]
    fn maps_range_onto_interval() {
        let d = column(&[0.0, 5.0, 10.0]);
        let s = fit_scaling(&d, -1.0, 1.0).unwrap();
        let scaled = apply_scaling(&d, &s).unwrap();
        assert_eq!(scaled.features().to_rows(), vec![vec![-1.0], vec![0.0], vec![1.0]]);
        assert_eq!(scaled.labels(), d.labels());
    }

    #[test]
    fn constant_feature_goes_to_lower_bound() {
        let d = column(&[4.0, 4.0]);
        let s = fit_scaling(&d, -1.0, 1.0).unwrap();
        assert_eq!(apply_scaling(&d, &s).unwrap().features().to_rows(), vec![vec![-1.0], vec![-1.0]]);
    }

    #[test]
    fn test_values_are_not_clamped() {
        let s = fit_scaling(&column(&[0.0, 10.0]), -1.0, 1.0).unwrap();
        assert_eq!(s.scale_value(0, 20.0), 3.0);
    }

    #[test]
    fn inverted_interval() {
        let d = column(&[0.0, 1.0]);
        assert!(matches!(fit_scaling(&d, 1.0, 1.0), Err(Error::InvalidRange { .. })));
        assert!(matches!(fit_scaling(&d, 2.0, -1.0), Err(Error::InvalidRange { .. })));
    }

    #[test]
    fn range_file_round_trip() {
        let s = ScalingParams {
            lo: -1.0,
            hi: 1.0,
            ranges: vec![(0.1, 7.25), (-3.0, -3.0)],
        };
        let mut first = Vec::new();
        s.write(&mut first).unwrap();
        let back = ScalingParams::read(first.as_slice()).unwrap();
        assert_eq!(back, s);
        let mut second = Vec::new();
        back.write(&mut second).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn longer_rows_than_ranges() {
        let s = ScalingParams {
            lo: 0.0,
            hi: 1.0,
            ranges: vec![(0.0, 1.0)],
        };
        assert!(s.apply_rows(&mut [vec![0.5, 0.5]]).is_err());
        let mut short = vec![vec![0.25]];
        s.apply_rows(&mut short).unwrap();
        assert_eq!(short, vec![vec![0.25]]);
    }
}
