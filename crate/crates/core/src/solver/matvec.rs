//! Matrix-free product with the reduced system matrix.
//!
//! Entries are regenerated on every product from the kernel and the q cache.
//! The row range is cut into `row_block`-sized tiles and only tiles with
//! `row tile <= column tile` are evaluated; each entry then contributes to
//! both its own row and the mirrored one. Inside a tile the feature loop is
//! staged `feature_block` features at a time into small contiguous buffers
//! before the outer-product accumulation.
//!
//! Row tiles are split into contiguous, work-balanced ranges, one per
//! worker. A worker adds its row contributions straight into its own slice
//! of the output and its mirrored contributions into a private scratch
//! vector; the scratch vectors are summed in worker order afterwards, so the
//! result is bit-identical across runs for a fixed worker count.

use std::ops::Range;
use std::thread;

use crate::error::{Error, Result};
use crate::kernel::KernelConfig;
use crate::matrix::{FeatureMatrix, Real};
use crate::solver::cg::LinearOperator;
use crate::solver::qcache::QCache;

/// Feature-major point data, possibly restricted to a feature range.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PointView<'a, T> {
    /// `num_features * padded_points` values.
    pub values: &'a [T],
    pub padded_points: usize,
    pub num_features: usize,
}

impl<'a, T: Real> PointView<'a, T> {
    pub fn of_matrix(matrix: &'a FeatureMatrix<T>) -> Self {
        Self {
            values: matrix.values(),
            padded_points: matrix.padded_points(),
            num_features: matrix.padded_features(),
        }
    }
}

/// The reduced matrix as a [`LinearOperator`].
#[derive(Debug, Clone)]
pub struct ImplicitQTilde<'a, T> {
    view: PointView<'a, T>,
    size: usize,
    q: &'a [T],
    q_mm: T,
    diag: T,
    kernel: KernelConfig,
    row_block: usize,
    feature_block: usize,
    workers: usize,
}

impl<'a, T: Real> ImplicitQTilde<'a, T> {
    pub fn new(
        features: &'a FeatureMatrix<T>,
        cache: &'a QCache<T>,
        kernel: KernelConfig,
        cost: f64,
    ) -> Self {
        Self::from_view(
            PointView::of_matrix(features),
            cache,
            kernel,
            T::one() / T::of(cost),
            features.row_block(),
            features.feature_block(),
        )
    }

    /// `diag` is the value added on the diagonal (`1/C`, or zero for all but
    /// one feature partition).
    pub(crate) fn from_view(
        view: PointView<'a, T>,
        cache: &'a QCache<T>,
        kernel: KernelConfig,
        diag: T,
        row_block: usize,
        feature_block: usize,
    ) -> Self {
        let size = cache.q.len();
        debug_assert!(size.div_ceil(row_block) * row_block <= view.padded_points);
        Self {
            view,
            size,
            q: &cache.q,
            q_mm: cache.q_mm,
            diag,
            kernel,
            row_block,
            feature_block,
            workers: 1,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Computes `out = Q~ v`.
    pub fn multiply(&self, v: &[T], out: &mut [T]) -> Result<()> {
        if v.len() != self.size {
            return Err(Error::Shape {
                expected: self.size,
                actual: v.len(),
            });
        }
        if out.len() != self.size {
            return Err(Error::Shape {
                expected: self.size,
                actual: out.len(),
            });
        }
        if self.size == 0 {
            return Ok(());
        }
        let b = self.row_block;
        let num_tiles = self.size.div_ceil(b);
        let padded = num_tiles * b;
        let ranges = balance_row_tiles(num_tiles, self.workers);

        let mut direct = vec![T::zero(); padded];
        let scratches: Vec<Vec<T>> = if ranges.len() == 1 {
            let mut scratch = vec![T::zero(); padded];
            self.process(ranges[0].clone(), &mut direct, &mut scratch, v);
            vec![scratch]
        } else {
            thread::scope(|s| {
                let mut rest = direct.as_mut_slice();
                let mut handles = Vec::with_capacity(ranges.len());
                for range in &ranges {
                    let (own, tail) = rest.split_at_mut(range.len() * b);
                    rest = tail;
                    let range = range.clone();
                    handles.push(s.spawn(move || {
                        let mut scratch = vec![T::zero(); padded];
                        self.process(range, own, &mut scratch, v);
                        scratch
                    }));
                }
                handles
                    .into_iter()
                    .map(|h| h.join().expect("matvec worker panicked"))
                    .collect()
            })
        };

        for (i, o) in out.iter_mut().enumerate() {
            let mut sum = direct[i];
            for scratch in &scratches {
                sum += scratch[i];
            }
            *o = sum;
        }
        Ok(())
    }

    /// Handles row tiles `tiles`; `own` covers exactly those rows.
    fn process(&self, tiles: Range<usize>, own: &mut [T], scratch: &mut [T], v: &[T]) {
        let b = self.row_block;
        let num_tiles = self.size.div_ceil(b);
        let row_offset = tiles.start * b;
        let mut acc = vec![T::zero(); b * b];
        let (q, q_mm, size) = (self.q, self.q_mm, self.size);

        for ib in tiles {
            let i0 = ib * b;
            let ilim = b.min(size - i0);
            for jb in ib..num_tiles {
                let j0 = jb * b;
                let jlim = b.min(size - j0);
                self.tile_kernel(i0, j0, &mut acc);

                if ib == jb {
                    for ii in 0..ilim {
                        let i = i0 + ii;
                        let qi = q[i];
                        let row = &acc[ii * b..(ii + 1) * b];
                        let e = row[ii] + self.diag - qi - qi + q_mm;
                        own[i - row_offset] += e * v[i];
                        for jj in ii + 1..jlim {
                            let j = j0 + jj;
                            let e = row[jj] - q[j] - qi + q_mm;
                            own[i - row_offset] += e * v[j];
                            own[j - row_offset] += e * v[i];
                        }
                    }
                } else {
                    for ii in 0..ilim {
                        let i = i0 + ii;
                        let qi = q[i];
                        let vi = v[i];
                        let row = &acc[ii * b..(ii + 1) * b];
                        let mut sum = T::zero();
                        for jj in 0..jlim {
                            let j = j0 + jj;
                            let e = row[jj] - q[j] - qi + q_mm;
                            sum += e * v[j];
                            scratch[j] += e * vi;
                        }
                        own[i - row_offset] += sum;
                    }
                }
            }
        }
    }

    /// Fills `acc` with kernel values for the `b x b` point pairs starting at
    /// rows `i0` and `j0`, walking the features `feature_block` at a time.
    /// Feature-major storage makes each feature's slice of the tile
    /// contiguous, so no staging copy is needed.
    fn tile_kernel(&self, i0: usize, j0: usize, acc: &mut [T]) {
        let b = self.row_block;
        let pp = self.view.padded_points;
        let values = self.view.values;
        let distance = self.kernel.uses_distance();
        if b == 8 {
            if distance {
                fixed_tile::<T, 8, true>(values, pp, self.view.num_features, self.feature_block, i0, j0, acc);
            } else {
                fixed_tile::<T, 8, false>(values, pp, self.view.num_features, self.feature_block, i0, j0, acc);
            }
            for a in acc.iter_mut() {
                *a = self.kernel.finish(*a);
            }
            return;
        }
        acc.fill(T::zero());

        let mut f0 = 0;
        while f0 < self.view.num_features {
            let width = self.feature_block.min(self.view.num_features - f0);
            for f in f0..f0 + width {
                let column = &values[f * pp..(f + 1) * pp];
                let a = &column[i0..i0 + b];
                let c = &column[j0..j0 + b];
                for (row, &ai) in acc.chunks_exact_mut(b).zip(a) {
                    if distance {
                        for (r, &cj) in row.iter_mut().zip(c) {
                            let diff = ai - cj;
                            *r += diff * diff;
                        }
                    } else {
                        for (r, &cj) in row.iter_mut().zip(c) {
                            *r += ai * cj;
                        }
                    }
                }
            }
            f0 += width;
        }
        for a in acc.iter_mut() {
            *a = self.kernel.finish(*a);
        }
    }
}

/// [`ImplicitQTilde::tile_kernel`] with the row block known at compile time,
/// so each accumulator row stays in registers across a feature block.
fn fixed_tile<T: Real, const B: usize, const DISTANCE: bool>(
    values: &[T],
    pp: usize,
    num_features: usize,
    feature_block: usize,
    i0: usize,
    j0: usize,
    acc: &mut [T],
) {
    let mut tile = [[T::zero(); B]; B];
    let mut f0 = 0;
    while f0 < num_features {
        let f1 = num_features.min(f0 + feature_block);
        for (ii, row) in tile.iter_mut().enumerate() {
            let mut r = *row;
            for f in f0..f1 {
                let base = f * pp;
                let ai = values[base + i0 + ii];
                let c: &[T; B] = values[base + j0..base + j0 + B].try_into().unwrap();
                for jj in 0..B {
                    if DISTANCE {
                        let diff = ai - c[jj];
                        r[jj] += diff * diff;
                    } else {
                        r[jj] += ai * c[jj];
                    }
                }
            }
            *row = r;
        }
        f0 = f1;
    }
    for (dst, row) in acc.chunks_exact_mut(B).zip(&tile) {
        dst.copy_from_slice(row);
    }
}

impl<T: Real> LinearOperator<T> for ImplicitQTilde<'_, T> {
    fn dim(&self) -> usize {
        self.size
    }

    fn apply(&self, v: &[T], out: &mut [T]) -> Result<()> {
        self.multiply(v, out)
    }
}

/// Splits `num_tiles` row tiles into at most `workers` contiguous ranges of
/// roughly equal upper-triangular work (tile `ib` owns `num_tiles - ib`
/// tiles).
pub(crate) fn balance_row_tiles(num_tiles: usize, workers: usize) -> Vec<Range<usize>> {
    let workers = workers.clamp(1, num_tiles.max(1));
    let total = num_tiles * (num_tiles + 1) / 2;
    let mut ranges = Vec::with_capacity(workers);
    let mut start = 0;
    let mut done = 0;
    for k in 1..=workers {
        let target = total * k / workers;
        let mut end = start;
        while end < num_tiles && (done < target || k == workers) {
            done += num_tiles - end;
            end += 1;
        }
        if end > start {
            ranges.push(start..end);
        }
        start = end;
    }
    ranges
}

/// `Q~ v` for the full feature set.
pub fn matvec_qtilde<T: Real>(
    features: &FeatureMatrix<T>,
    cache: &QCache<T>,
    kernel: &KernelConfig,
    cost: f64,
    v: &[T],
    workers: usize,
) -> Result<Vec<T>> {
    let op = ImplicitQTilde::new(features, cache, *kernel, cost).with_workers(workers);
    let mut out = vec![T::zero(); cache.q.len()];
    op.multiply(v, &mut out)?;
    Ok(out)
}
