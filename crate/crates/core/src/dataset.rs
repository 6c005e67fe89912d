use crate::error::{Error, Result};
use crate::matrix::FeatureMatrix;

/// Binary class label in solver space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn value(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => -1.0,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            Label::Positive => Label::Negative,
            Label::Negative => Label::Positive,
        }
    }
}

/// Original label strings: the first one seen maps to +1, the second to -1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    pub positive: String,
    pub negative: String,
}

impl LabelMap {
    pub fn new(positive: impl Into<String>, negative: impl Into<String>) -> Self {
        Self {
            positive: positive.into(),
            negative: negative.into(),
        }
    }

    pub fn original(&self, label: Label) -> &str {
        match label {
            Label::Positive => &self.positive,
            Label::Negative => &self.negative,
        }
    }

    pub fn lookup(&self, original: &str) -> Option<Label> {
        if original == self.positive {
            Some(Label::Positive)
        } else if original == self.negative {
            Some(Label::Negative)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: FeatureMatrix<f64>,
    labels: Vec<Label>,
    label_map: LabelMap,
}

impl Dataset {
    pub fn new(features: FeatureMatrix<f64>, labels: Vec<Label>, label_map: LabelMap) -> Result<Self> {
        if labels.len() != features.num_points() {
            return Err(Error::Shape {
                expected: features.num_points(),
                actual: labels.len(),
            });
        }
        if labels.len() < 2 {
            return Err(Error::EmptyData("a dataset needs at least two points".into()));
        }
        if !labels.contains(&Label::Positive) || !labels.contains(&Label::Negative) {
            return Err(Error::MalformedData("both classes must be present".into()));
        }
        Ok(Self {
            features,
            labels,
            label_map,
        })
    }

    /// Maps original label strings with the first-seen rule.
    pub fn from_labeled_points<P: AsRef<[f64]>, L: AsRef<str>>(
        points: &[P],
        labels: &[L],
        row_block: usize,
        feature_block: usize,
    ) -> Result<Self> {
        let features = FeatureMatrix::from_points(points, row_block, feature_block)?;
        let (mapped, label_map) = map_labels(labels)?;
        Self::new(features, mapped, label_map)
    }

    pub fn features(&self) -> &FeatureMatrix<f64> {
        &self.features
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label_values(&self) -> Vec<f64> {
        self.labels.iter().map(|l| l.value()).collect()
    }

    pub fn label_map(&self) -> &LabelMap {
        &self.label_map
    }

    pub fn num_points(&self) -> usize {
        self.features.num_points()
    }

    pub fn num_features(&self) -> usize {
        self.features.num_features()
    }

    /// Original label strings, in point order.
    pub fn original_labels(&self) -> Vec<&str> {
        self.labels.iter().map(|&l| self.label_map.original(l)).collect()
    }

    pub fn with_blocks(&self, row_block: usize, feature_block: usize) -> Result<Self> {
        Ok(Self {
            features: self.features.with_blocks(row_block, feature_block)?,
            labels: self.labels.clone(),
            label_map: self.label_map.clone(),
        })
    }

    pub fn with_features(&self, features: FeatureMatrix<f64>) -> Result<Self> {
        Self::new(features, self.labels.clone(), self.label_map.clone())
    }
}

/// Applies the first-seen label rule. Errors when the labels do not name
/// exactly two classes.
pub fn map_labels<L: AsRef<str>>(labels: &[L]) -> Result<(Vec<Label>, LabelMap)> {
    let mut positive: Option<&str> = None;
    let mut negative: Option<&str> = None;
    let mut mapped = Vec::with_capacity(labels.len());
    for (idx, l) in labels.iter().enumerate() {
        let l = l.as_ref();
        let label = match (positive, negative) {
            (Some(p), _) if p == l => Label::Positive,
            (_, Some(n)) if n == l => Label::Negative,
            (None, _) => {
                positive = Some(l);
                Label::Positive
            }
            (Some(_), None) => {
                negative = Some(l);
                Label::Negative
            }
            (Some(_), Some(_)) => {
                return Err(Error::MalformedData(format!(
                    "point {idx} introduces a third label {l:?}"
                )))
            }
        };
        mapped.push(label);
    }
    match (positive, negative) {
        (Some(p), Some(n)) => Ok((mapped, LabelMap::new(p, n))),
        _ => Err(Error::MalformedData("fewer than two distinct labels".into())),
    }
}
