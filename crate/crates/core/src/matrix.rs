//! Padded, feature-major dense storage for training points.
//!
//! All values of feature 0 come first (one entry per point, padded), then
//! feature 1, and so on. Point `i`, feature `j` lives at
//! `j * padded_points + i`. Both dimensions are rounded up to a multiple of
//! their block size and the padding is filled with zeros, so blocked loops
//! never need boundary checks on the data itself.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, NumAssign};

use crate::error::{Error, Result};

/// Floating-point type the solver can run in.
pub trait Real:
    Float + FromPrimitive + NumAssign + Default + Debug + Display + Send + Sync + 'static
{
    fn of(value: f64) -> Self {
        <Self as FromPrimitive>::from_f64(value).expect("f64 is representable")
    }

    fn as_f64(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).expect("float converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub const DEFAULT_BLOCK: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix<T = f64> {
    num_points: usize,
    num_features: usize,
    padded_points: usize,
    padded_features: usize,
    row_block: usize,
    feature_block: usize,
    values: Vec<T>,
}

fn round_up(n: usize, block: usize) -> usize {
    n.div_ceil(block) * block
}

impl<T: Real> FeatureMatrix<T> {
    /// Builds the padded layout from row-major points.
    pub fn from_points<P: AsRef<[T]>>(
        points: &[P],
        row_block: usize,
        feature_block: usize,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyData("no points given".into()));
        }
        let num_features = points[0].as_ref().len();
        if num_features == 0 {
            return Err(Error::EmptyData("points have no features".into()));
        }
        if let Some((idx, p)) = points
            .iter()
            .enumerate()
            .find(|(_, p)| p.as_ref().len() != num_features)
        {
            return Err(Error::MalformedData(format!(
                "point {idx} has {} features, expected {num_features}",
                p.as_ref().len()
            )));
        }
        let mut matrix = Self::zeros(points.len(), num_features, row_block, feature_block)?;
        for (i, p) in points.iter().enumerate() {
            for (j, &v) in p.as_ref().iter().enumerate() {
                matrix.values[j * matrix.padded_points + i] = v;
            }
        }
        Ok(matrix)
    }

    /// All-zero matrix with the given logical shape.
    pub fn zeros(
        num_points: usize,
        num_features: usize,
        row_block: usize,
        feature_block: usize,
    ) -> Result<Self> {
        if num_points == 0 || num_features == 0 {
            return Err(Error::EmptyData(format!(
                "matrix shape {num_points}x{num_features}"
            )));
        }
        if row_block == 0 || feature_block == 0 {
            return Err(crate::ParameterError::ZeroBlock.into());
        }
        let padded_points = round_up(num_points, row_block);
        let padded_features = round_up(num_features, feature_block);
        Ok(Self {
            num_points,
            num_features,
            padded_points,
            padded_features,
            row_block,
            feature_block,
            values: vec![T::zero(); padded_points * padded_features],
        })
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn num_features(&self) -> usize {
        self.num_features
    }

    pub fn padded_points(&self) -> usize {
        self.padded_points
    }

    pub fn padded_features(&self) -> usize {
        self.padded_features
    }

    pub fn row_block(&self) -> usize {
        self.row_block
    }

    pub fn feature_block(&self) -> usize {
        self.feature_block
    }

    /// The raw padded buffer, feature-major.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn index(&self, point: usize, feature: usize) -> usize {
        feature * self.padded_points + point
    }

    pub fn get(&self, point: usize, feature: usize) -> T {
        assert!(point < self.num_points && feature < self.num_features);
        self.values[self.index(point, feature)]
    }

    pub(crate) fn set(&mut self, point: usize, feature: usize, value: T) {
        assert!(point < self.num_points && feature < self.num_features);
        let idx = self.index(point, feature);
        self.values[idx] = value;
    }

    /// One feature across all (padded) points.
    pub fn feature_column(&self, feature: usize) -> &[T] {
        let start = feature * self.padded_points;
        &self.values[start..start + self.padded_points]
    }

    /// Copies a point out into a contiguous buffer including the zero-padded
    /// feature tail.
    pub fn padded_point(&self, point: usize) -> Vec<T> {
        (0..self.padded_features)
            .map(|j| self.values[j * self.padded_points + point])
            .collect()
    }

    /// Copies a point out without padding.
    pub fn point(&self, point: usize) -> Vec<T> {
        (0..self.num_features).map(|j| self.get(point, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.num_points).map(|i| self.point(i)).collect()
    }

    /// Converts the element type, keeping the layout.
    pub fn cast<U: Real>(&self) -> FeatureMatrix<U> {
        FeatureMatrix {
            num_points: self.num_points,
            num_features: self.num_features,
            padded_points: self.padded_points,
            padded_features: self.padded_features,
            row_block: self.row_block,
            feature_block: self.feature_block,
            values: self
                .values
                .iter()
                .map(|&v| U::of(v.as_f64()))
                .collect(),
        }
    }

    /// Re-pads the same points for different block sizes.
    pub fn with_blocks(&self, row_block: usize, feature_block: usize) -> Result<Self> {
        let mut out = Self::zeros(self.num_points, self.num_features, row_block, feature_block)?;
        for j in 0..self.num_features {
            let src = &self.feature_column(j)[..self.num_points];
            let start = j * out.padded_points;
            out.values[start..start + self.num_points].copy_from_slice(src);
        }
        Ok(out)
    }
}

/// Row-major points to the padded feature-major layout.
pub fn build_feature_matrix<T: Real, P: AsRef<[T]>>(
    points: &[P],
    row_block: usize,
    feature_block: usize,
) -> Result<FeatureMatrix<T>> {
    FeatureMatrix::from_points(points, row_block, feature_block)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_points_unit_blocks() {
        let m = build_feature_matrix(&[vec![1.0, 2.0], vec![3.0, 4.0]], 1, 1).unwrap();
        assert_eq!(m.values(), &[1.0, 3.0, 2.0, 4.0]);
        assert_eq!((m.padded_points(), m.padded_features()), (2, 2));
    }

    #[test]
    fn single_point_padded_to_block() {
        let m = build_feature_matrix(&[vec![5.0]], 4, 4).unwrap();
        assert_eq!(m.values().len(), 16);
        assert_eq!(m.values()[0], 5.0);
        assert!(m.values()[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rounds_points_to_block_multiple() {
        let pts = vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]];
        let m = build_feature_matrix(&pts, 2, 2).unwrap();
        assert_eq!(m.padded_points(), 4);
        assert_eq!(m.padded_features(), 2);
        assert_eq!(m.values().len(), 8);
        assert_eq!(m.values()[3], 0.0);
        assert_eq!(m.values()[7], 0.0);
    }

    #[test]
    fn ragged_and_empty_are_rejected() {
        let ragged = vec![vec![1.0, 2.0], vec![3.0]];
        assert!(matches!(
            build_feature_matrix(&ragged, 1, 1),
            Err(Error::MalformedData(_))
        ));
        let empty: Vec<Vec<f64>> = vec![];
        assert!(matches!(
            build_feature_matrix(&empty, 1, 1),
            Err(Error::EmptyData(_))
        ));
    }

    #[test]
    fn with_blocks_preserves_points() {
        let pts = vec![vec![1.0, -2.0, 3.0], vec![4.0, 5.0, -6.0]];
        let m = build_feature_matrix(&pts, 1, 1).unwrap();
        let r = m.with_blocks(3, 2).unwrap();
        assert_eq!(r.to_rows(), pts);
        assert_eq!(r.padded_points(), 3);
        assert_eq!(r.padded_features(), 4);
    }

    proptest! {
        #[test]
        fn elements_read_back_exactly(
            rows in 1usize..12,
            cols in 1usize..9,
            rb in 1usize..10,
            fb in 1usize..10,
            seed in proptest::collection::vec(-1e6f64..1e6, 108),
        ) {
            let pts: Vec<Vec<f64>> = (0..rows)
                .map(|i| (0..cols).map(|j| seed[i * cols + j]).collect())
                .collect();
            let m = build_feature_matrix(&pts, rb, fb).unwrap();
            prop_assert_eq!(m.padded_points() % rb, 0);
            prop_assert_eq!(m.padded_features() % fb, 0);
            for i in 0..rows {
                for j in 0..cols {
                    prop_assert_eq!(m.get(i, j).to_bits(), pts[i][j].to_bits());
                    prop_assert_eq!(m.values()[j * m.padded_points() + i], pts[i][j]);
                }
            }
            let nonzero_padding = (0..m.padded_features())
                .flat_map(|j| (0..m.padded_points()).map(move |i| (i, j)))
                .filter(|&(i, j)| i >= rows || j >= cols)
                .any(|(i, j)| m.values()[j * m.padded_points() + i] != 0.0);
            prop_assert!(!nonzero_padding);
        }
    }
}
