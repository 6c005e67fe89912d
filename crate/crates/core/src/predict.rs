use std::thread;

use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};
use crate::kernel::kernel_eval;
use crate::model::Model;

/// Model support points copied out row-major once, for repeated queries.
pub struct Predictor<'a> {
    model: &'a Model,
    rows: Vec<Vec<f64>>,
}

impl<'a> Predictor<'a> {
    pub fn new(model: &'a Model) -> Self {
        let sv = &model.support_points;
        let rows = (0..sv.num_points()).map(|i| sv.padded_point(i)).collect();
        Self { model, rows }
    }

    /// Zero-extends `x` to the model's padded width. Extra trailing features
    /// are accepted only when they are zero.
    fn query(&self, x: &[f64]) -> Result<Vec<f64>> {
        let sv = &self.model.support_points;
        let nf = sv.num_features();
        if let Some(extra) = x.iter().skip(nf).position(|&v| v != 0.0) {
            return Err(Error::Dimension {
                index: nf + extra + 1,
                model_features: nf,
            });
        }
        let mut q = vec![0.0; sv.padded_features()];
        let n = x.len().min(nf);
        q[..n].copy_from_slice(&x[..n]);
        Ok(q)
    }

    pub fn decision_value(&self, x: &[f64]) -> Result<f64> {
        let q = self.query(x)?;
        let mut sum = 0.0;
        for (row, &a) in self.rows.iter().zip(&self.model.weights) {
            sum += a * kernel_eval(&self.model.kernel, row, &q);
        }
        Ok(sum + self.model.bias)
    }

    pub fn predict_label(&self, x: &[f64]) -> Result<&'a str> {
        let label = label_for(self.decision_value(x)?);
        Ok(self.model.label_map.original(label))
    }

    /// Decision values for many points, split across `threads` workers in
    /// contiguous chunks; output order follows input order.
    pub fn decision_values<P: AsRef<[f64]> + Sync>(&self, points: &[P], threads: usize) -> Result<Vec<f64>> {
        let threads = threads.clamp(1, points.len().max(1));
        if threads == 1 {
            return points.iter().map(|p| self.decision_value(p.as_ref())).collect();
        }
        let chunk = points.len().div_ceil(threads);
        thread::scope(|s| {
            let handles: Vec<_> = points
                .chunks(chunk)
                .map(|c| {
                    s.spawn(move || {
                        c.iter()
                            .map(|p| self.decision_value(p.as_ref()))
                            .collect::<Result<Vec<_>>>()
                    })
                })
                .collect();
            let mut out = Vec::with_capacity(points.len());
            for h in handles {
                out.extend(h.join().expect("prediction worker panicked")?);
            }
            Ok(out)
        })
    }
}

/// Strict sign; an exact zero goes to the +1 class.
pub fn label_for(decision: f64) -> Label {
    if decision < 0.0 {
        Label::Negative
    } else {
        Label::Positive
    }
}

pub fn decision_value(model: &Model, x: &[f64]) -> Result<f64> {
    Predictor::new(model).decision_value(x)
}

pub fn predict_label<'a>(model: &'a Model, x: &[f64]) -> Result<&'a str> {
    Predictor::new(model).predict_label(x)
}

/// Fraction of points whose predicted original label equals `labels`.
pub fn accuracy<P: AsRef<[f64]> + Sync, L: AsRef<str>>(
    model: &Model,
    points: &[P],
    labels: &[L],
    threads: usize,
) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyTest);
    }
    if points.len() != labels.len() {
        return Err(Error::Shape {
            expected: points.len(),
            actual: labels.len(),
        });
    }
    let predictor = Predictor::new(model);
    let values = predictor.decision_values(points, threads)?;
    let correct = values
        .iter()
        .zip(labels)
        .filter(|(&v, l)| model.label_map.original(label_for(v)) == l.as_ref())
        .count();
    Ok(correct as f64 / points.len() as f64)
}

/// Accuracy on a labeled dataset. Test labels are compared through their
/// original strings, so the test file may have seen them in either order.
pub fn evaluate(model: &Model, test: &Dataset) -> Result<f64> {
    for label in [&test.label_map().positive, &test.label_map().negative] {
        if model.label_map.lookup(label).is_none() {
            return Err(Error::UnknownLabel(label.clone()));
        }
    }
    let points = test.features().to_rows();
    accuracy(model, &points, &test.original_labels(), 1)
}
