use crate::error::{Error, Result};
use crate::kernel::KernelConfig;
use crate::matrix::{FeatureMatrix, Real};

/// Kernel values against the last training point, which anchors the
/// reduced system.
#[derive(Debug, Clone, PartialEq)]
pub struct QCache<T> {
    /// `q[i] = k(x_i, x_last)` for every point but the last.
    pub q: Vec<T>,
    /// `k(x_last, x_last) + 1/C`.
    pub q_mm: T,
}

impl<T: Real> QCache<T> {
    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }
}

/// Accumulates `k(x_i, x_last)` for every point in one pass over the
/// feature-major columns in `features`. Features are visited in ascending
/// order, so each entry matches [`crate::kernel::kernel_eval`] bit for bit.
pub(crate) fn last_point_kernel_row<T: Real>(
    columns: &[T],
    padded_points: usize,
    num_points: usize,
    cfg: &KernelConfig,
) -> (Vec<T>, T) {
    let n = num_points - 1;
    let mut acc = vec![T::zero(); num_points];
    for column in columns.chunks_exact(padded_points) {
        let xm = column[n];
        if cfg.uses_distance() {
            for (a, &x) in acc.iter_mut().zip(&column[..num_points]) {
                let diff = x - xm;
                *a += diff * diff;
            }
        } else {
            for (a, &x) in acc.iter_mut().zip(&column[..num_points]) {
                *a += x * xm;
            }
        }
    }
    let k_mm = cfg.finish(acc[n]);
    acc.truncate(n);
    for a in &mut acc {
        *a = cfg.finish(*a);
    }
    (acc, k_mm)
}

pub fn precompute_q<T: Real>(
    features: &FeatureMatrix<T>,
    cfg: &KernelConfig,
    cost: f64,
) -> Result<QCache<T>> {
    let m = features.num_points();
    if m < 2 {
        return Err(Error::EmptyData("training needs at least two points".into()));
    }
    let (q, k_mm) = last_point_kernel_row(features.values(), features.padded_points(), m, cfg);
    Ok(QCache {
        q,
        q_mm: k_mm + T::one() / T::of(cost),
    })
}

/// One entry of the reduced matrix, recomputed from scratch:
/// `k(x_i, x_j) + [i == j]/C - q_j - q_i + q_mm`.
pub fn qtilde_entry<T: Real>(
    features: &FeatureMatrix<T>,
    cache: &QCache<T>,
    cfg: &KernelConfig,
    cost: f64,
    i: usize,
    j: usize,
) -> Result<T> {
    let n = cache.q.len();
    if i >= n || j >= n {
        return Err(Error::OutOfBounds {
            row: i,
            col: j,
            size: n,
        });
    }
    let k = cfg.eval(&features.padded_point(i), &features.padded_point(j));
    let diag = if i == j {
        T::one() / T::of(cost)
    } else {
        T::zero()
    };
    Ok(k + diag - cache.q[j] - cache.q[i] + cache.q_mm)
}
