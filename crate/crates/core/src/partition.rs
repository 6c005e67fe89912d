//! Feature-wise splitting of the linear-kernel matvec across workers.
//!
//! Because `<x, z>` is the sum of the dot products over disjoint feature
//! ranges, each partition can build its own partial `Q~ v` from its feature
//! slice alone; the partials are summed afterwards. The terms of an entry
//! that do not split over features (`1/C` on the diagonal and inside `q_mm`)
//! are carried by partition 0 only.

use std::thread;

use crate::error::{Error, ParameterError, Result};
use crate::kernel::{KernelConfig, KernelKind};
use crate::matrix::{FeatureMatrix, Real};
use crate::solver::cg::LinearOperator;
use crate::solver::matvec::{ImplicitQTilde, PointView};
use crate::solver::qcache::{last_point_kernel_row, QCache};

/// A contiguous range of features of a parent matrix. Since the layout is
/// feature-major this is a contiguous sub-slice of the parent's buffer.
#[derive(Debug, Clone, Copy)]
pub struct FeatureSlice<'a, T> {
    pub index: usize,
    pub start: usize,
    pub end: usize,
    matrix: &'a FeatureMatrix<T>,
}

impl<'a, T: Real> FeatureSlice<'a, T> {
    pub fn num_features(&self) -> usize {
        self.end - self.start
    }

    /// The feature-major values of this slice.
    pub fn values(&self) -> &'a [T] {
        let pp = self.matrix.padded_points();
        &self.matrix.values()[self.start * pp..self.end * pp]
    }

    pub fn matrix(&self) -> &'a FeatureMatrix<T> {
        self.matrix
    }

    fn view(&self) -> PointView<'a, T> {
        PointView {
            values: self.values(),
            padded_points: self.matrix.padded_points(),
            num_features: self.num_features(),
        }
    }
}

/// Splits the features into `partitions` balanced ranges; earlier slices
/// take the extra feature when the count does not divide evenly.
pub fn split_features<'a, T: Real>(
    matrix: &'a FeatureMatrix<T>,
    kernel: &KernelConfig,
    partitions: usize,
) -> Result<Vec<FeatureSlice<'a, T>>> {
    if partitions == 0 {
        return Err(ParameterError::ZeroPartitions.into());
    }
    if partitions > 1 && kernel.kind != KernelKind::Linear {
        return Err(ParameterError::PartitionedNonlinearKernel.into());
    }
    let features = matrix.num_features();
    if partitions > features {
        return Err(Error::OverPartition {
            partitions,
            features,
        });
    }
    let base = features / partitions;
    let extra = features % partitions;
    let mut start = 0;
    Ok((0..partitions)
        .map(|index| {
            let len = base + usize::from(index < extra);
            let slice = FeatureSlice {
                index,
                start,
                end: start + len,
                matrix,
            };
            start += len;
            slice
        })
        .collect())
}

/// The partition's share of the q cache: partial dot products against the
/// last point, with `1/C` folded into `q_mm` for partition 0 only.
pub fn precompute_partial_q<T: Real>(slice: &FeatureSlice<'_, T>, cost: f64) -> Result<QCache<T>> {
    let m = slice.matrix.num_points();
    if m < 2 {
        return Err(Error::EmptyData("training needs at least two points".into()));
    }
    let (q, k_mm) = last_point_kernel_row(
        slice.values(),
        slice.matrix.padded_points(),
        m,
        &KernelConfig::linear(),
    );
    let q_mm = if slice.index == 0 {
        k_mm + T::one() / T::of(cost)
    } else {
        k_mm
    };
    Ok(QCache { q, q_mm })
}

fn partial_operator<'a, T: Real>(
    slice: &FeatureSlice<'a, T>,
    cache: &'a QCache<T>,
    cost: f64,
    workers: usize,
) -> ImplicitQTilde<'a, T> {
    let diag = if slice.index == 0 {
        T::one() / T::of(cost)
    } else {
        T::zero()
    };
    ImplicitQTilde::from_view(
        slice.view(),
        cache,
        KernelConfig::linear(),
        diag,
        slice.matrix.row_block(),
        slice.matrix.feature_block(),
    )
    .with_workers(workers)
}

/// This partition's contribution to `Q~ v`.
pub fn partial_linear_matvec<T: Real>(
    slice: &FeatureSlice<'_, T>,
    cache: &QCache<T>,
    cost: f64,
    v: &[T],
    workers: usize,
) -> Result<Vec<T>> {
    let mut out = vec![T::zero(); cache.q.len()];
    partial_operator(slice, cache, cost, workers).multiply(v, &mut out)?;
    Ok(out)
}

/// Elementwise sum in partition order.
pub fn reduce_sum<T: Real>(partials: &[Vec<T>]) -> Result<Vec<T>> {
    let Some(first) = partials.first() else {
        return Ok(Vec::new());
    };
    let mut out = first.clone();
    for partial in &partials[1..] {
        if partial.len() != out.len() {
            return Err(Error::Shape {
                expected: out.len(),
                actual: partial.len(),
            });
        }
        for (o, &p) in out.iter_mut().zip(partial) {
            *o += p;
        }
    }
    Ok(out)
}

/// `Q~` for the linear kernel, evaluated as a sum of per-partition partial
/// products that run concurrently.
pub struct PartitionedQTilde<'a, T> {
    slices: Vec<FeatureSlice<'a, T>>,
    caches: Vec<QCache<T>>,
    cost: f64,
    workers_per_partition: usize,
}

impl<'a, T: Real> PartitionedQTilde<'a, T> {
    /// `threads` is shared evenly between the partitions, at least one each.
    pub fn new(
        matrix: &'a FeatureMatrix<T>,
        kernel: &KernelConfig,
        cost: f64,
        partitions: usize,
        threads: usize,
    ) -> Result<Self> {
        let slices = split_features(matrix, kernel, partitions)?;
        let caches = slices
            .iter()
            .map(|s| precompute_partial_q(s, cost))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            slices,
            caches,
            cost,
            workers_per_partition: (threads / partitions).max(1),
        })
    }

    pub fn slices(&self) -> &[FeatureSlice<'a, T>] {
        &self.slices
    }

    /// The full q cache, summed from the partition shares.
    pub fn combined_cache(&self) -> Result<QCache<T>> {
        let q = reduce_sum(&self.caches.iter().map(|c| c.q.clone()).collect::<Vec<_>>())?;
        let mut q_mm = T::zero();
        for c in &self.caches {
            q_mm += c.q_mm;
        }
        Ok(QCache { q, q_mm })
    }
}

impl<T: Real> LinearOperator<T> for PartitionedQTilde<'_, T> {
    fn dim(&self) -> usize {
        self.caches[0].q.len()
    }

    fn apply(&self, v: &[T], out: &mut [T]) -> Result<()> {
        let partials: Vec<Vec<T>> = if self.slices.len() == 1 {
            vec![partial_linear_matvec(
                &self.slices[0],
                &self.caches[0],
                self.cost,
                v,
                self.workers_per_partition,
            )?]
        } else {
            thread::scope(|s| {
                let handles: Vec<_> = self
                    .slices
                    .iter()
                    .zip(&self.caches)
                    .map(|(slice, cache)| {
                        s.spawn(move || {
                            partial_linear_matvec(slice, cache, self.cost, v, self.workers_per_partition)
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("partition worker panicked"))
                    .collect::<Result<Vec<_>>>()
            })?
        };
        let sum = reduce_sum(&partials)?;
        if sum.len() != out.len() {
            return Err(Error::Shape {
                expected: sum.len(),
                actual: out.len(),
            });
        }
        out.copy_from_slice(&sum);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::build_feature_matrix;
    use crate::solver::{matvec_qtilde, precompute_q};

    fn matrix(features: usize) -> FeatureMatrix<f64> {
        let pts: Vec<Vec<f64>> = (0..9)
            .map(|i| (0..features).map(|j| ((i * 5 + j * 3) % 7) as f64 - 3.0).collect())
            .collect();
        build_feature_matrix(&pts, 2, 3).unwrap()
    }

    #[test]
    fn ten_features_two_ways() {
        let m = matrix(10);
        let s = split_features(&m, &KernelConfig::linear(), 2).unwrap();
        assert_eq!((s[0].start, s[0].end, s[1].start, s[1].end), (0, 5, 5, 10));
    }

    #[test]
    fn ten_features_three_ways() {
        let m = matrix(10);
        let sizes: Vec<_> = split_features(&m, &KernelConfig::linear(), 3)
            .unwrap()
            .iter()
            .map(|s| s.num_features())
            .collect();
        assert_eq!(sizes, vec![4, 3, 3]);
    }

    #[test]
    fn single_partition_covers_everything() {
        let m = matrix(10);
        let s = split_features(&m, &KernelConfig::radial(1.0), 1).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!((s[0].start, s[0].end), (0, 10));
    }

    #[test]
    fn split_errors() {
        let m = matrix(3);
        assert!(matches!(
            split_features(&m, &KernelConfig::linear(), 4),
            Err(Error::OverPartition { .. })
        ));
        assert!(matches!(
            split_features(&m, &KernelConfig::polynomial(1.0, 2, 0.0), 2),
            Err(Error::Parameter(ParameterError::PartitionedNonlinearKernel))
        ));
    }

    #[test]
    fn reduce_rules() {
        assert_eq!(reduce_sum(&[vec![0.0; 3], vec![0.0; 3]]).unwrap(), vec![0.0; 3]);
        assert_eq!(reduce_sum(&[vec![1.0, 2.0]]).unwrap(), vec![1.0, 2.0]);
        assert!(matches!(
            reduce_sum(&[vec![1.0, 2.0], vec![1.0]]),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn partitioned_product_matches_whole() {
        let m = matrix(4);
        let cfg = KernelConfig::linear();
        let cache = precompute_q(&m, &cfg, 0.7).unwrap();
        let v: Vec<f64> = (0..8).map(|i| 1.0 / (i as f64 + 1.0)).collect();
        let whole = matvec_qtilde(&m, &cache, &cfg, 0.7, &v, 1).unwrap();
        for p in [1, 2, 4] {
            let op = PartitionedQTilde::new(&m, &cfg, 0.7, p, 2).unwrap();
            let mut out = vec![0.0; 8];
            op.apply(&v, &mut out).unwrap();
            for (a, b) in out.iter().zip(&whole) {
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "p={p}: {a} vs {b}");
            }
            let combined = op.combined_cache().unwrap();
            for (a, b) in combined.q.iter().zip(&cache.q) {
                assert!((a - b).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn slice_storage_is_proportional() {
        let m = matrix(10);
        for p in 1..=10 {
            for s in split_features(&m, &KernelConfig::linear(), p).unwrap() {
                let cols = s.values().len() / m.padded_points();
                assert!(cols.abs_diff(10 / p) <= 1);
            }
        }
    }
}
