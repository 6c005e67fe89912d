//! Test-side oracles. Everything here is computed densely and directly from
//! the kernel definitions, without going through the solver's caches.

#![allow(dead_code)]

use lssvm::{Dataset, KernelConfig};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_points(rng: &mut ChaCha8Rng, m: usize, d: usize) -> Vec<Vec<f64>> {
    (0..m)
        .map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect()
}

/// Random points with labels alternating so both classes are present.
pub fn random_dataset(seed: u64, m: usize, d: usize, row_block: usize, feature_block: usize) -> Dataset {
    let mut rng = rng(seed);
    let points = random_points(&mut rng, m, d);
    let labels: Vec<&str> = (0..m)
        .map(|i| if i == 0 || (i > 1 && rng.random_bool(0.5)) { "1" } else { "-1" })
        .collect();
    Dataset::from_labeled_points(&points, &labels, row_block, feature_block).unwrap()
}

fn plain_kernel(k: &KernelConfig, x: &[f64], z: &[f64]) -> f64 {
    let dot: f64 = x.iter().zip(z).map(|(a, b)| a * b).sum();
    match k.kind {
        lssvm::KernelKind::Linear => dot,
        lssvm::KernelKind::Polynomial => (k.gamma * dot + k.coef0).powi(k.degree as i32),
        lssvm::KernelKind::Radial => {
            let d2: f64 = x.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum();
            (-k.gamma * d2).exp()
        }
    }
}

/// `Q = K + I/C`.
pub fn dense_q(points: &[Vec<f64>], k: &KernelConfig, cost: f64) -> DMatrix<f64> {
    let m = points.len();
    DMatrix::from_fn(m, m, |i, j| {
        plain_kernel(k, &points[i], &points[j]) + if i == j { 1.0 / cost } else { 0.0 }
    })
}

/// Solves the bordered system `[Q 1; 1' 0] [alpha; b] = [y; 0]` by LU.
pub fn full_system_solve(points: &[Vec<f64>], y: &[f64], k: &KernelConfig, cost: f64) -> (Vec<f64>, f64) {
    let m = points.len();
    let q = dense_q(points, k, cost);
    let mut a = DMatrix::zeros(m + 1, m + 1);
    a.view_mut((0, 0), (m, m)).copy_from(&q);
    for i in 0..m {
        a[(i, m)] = 1.0;
        a[(m, i)] = 1.0;
    }
    let mut rhs = DVector::zeros(m + 1);
    rhs.rows_mut(0, m).copy_from_slice(y);
    let sol = a.lu().solve(&rhs).expect("bordered system is nonsingular");
    (sol.rows(0, m).iter().copied().collect(), sol[m])
}

/// Reduced matrix built from the dense `Q`:
/// `Q~_ij = Q_ij - Q_im - Q_mj + Q_mm`, anchored at the last point.
pub fn dense_qtilde(points: &[Vec<f64>], k: &KernelConfig, cost: f64) -> DMatrix<f64> {
    let q = dense_q(points, k, cost);
    let m = points.len() - 1;
    DMatrix::from_fn(m, m, |i, j| q[(i, j)] - q[(i, m)] - q[(m, j)] + q[(m, m)])
}

pub fn naive_matvec(a: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)] * v[j]).sum())
        .collect()
}

/// `max_i |a_i - b_i| / max_i |b_i|`.
pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let scale = b.iter().fold(0.0f64, |s, x| s.max(x.abs())).max(f64::MIN_POSITIVE);
    a.iter().zip(b).fold(0.0f64, |s, (x, y)| s.max((x - y).abs())) / scale
}

/// Direct decision value from weights and bias.
pub fn oracle_decision(points: &[Vec<f64>], alpha: &[f64], b: f64, k: &KernelConfig, x: &[f64]) -> f64 {
    points
        .iter()
        .zip(alpha)
        .map(|(p, a)| a * plain_kernel(k, p, x))
        .sum::<f64>()
        + b
}

pub fn rows(dataset: &Dataset) -> Vec<Vec<f64>> {
    dataset.features().to_rows()
}
