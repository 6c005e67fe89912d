//! Seeded two-class "planes" data: two Gaussian clusters on either side of
//! a random hyperplane, plus a fraction of labels reassigned at random.

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::matrix::DEFAULT_BLOCK;

pub const DEFAULT_GAP: f64 = 2.0;
pub const DEFAULT_NOISE: f64 = 0.01;

/// Standard deviation of the clusters across the hyperplane. Within the
/// hyperplane the spread is 1. With the default gap the clusters' 3-sigma
/// slabs just touch, so only a handful of points land on the wrong side.
pub const NORMAL_SPREAD: f64 = 1.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoiseReport {
    /// Labels drawn again uniformly from {-1, +1}.
    pub reassigned: usize,
    /// The subset of those that actually changed class.
    pub changed: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanesConfig {
    pub points: usize,
    pub features: usize,
    pub noise: f64,
    pub gap: f64,
    pub seed: u64,
}

impl PlanesConfig {
    pub fn new(points: usize, features: usize, seed: u64) -> Self {
        Self {
            points,
            features,
            noise: DEFAULT_NOISE,
            gap: DEFAULT_GAP,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::Generator(format!("need at least 2 points, got {}", self.points)));
        }
        if self.features < 1 {
            return Err(Error::Generator("need at least 1 feature".into()));
        }
        if !(0.0..0.5).contains(&self.noise) {
            return Err(Error::Generator(format!("noise must lie in [0, 0.5), got {}", self.noise)));
        }
        if !(self.gap >= 0.0 && self.gap.is_finite()) {
            return Err(Error::Generator(format!("gap must be non-negative, got {}", self.gap)));
        }
        Ok(())
    }

    pub fn noisy_labels(&self) -> usize {
        // guard against products like 0.29 * 100 = 28.999999999999996
        (self.noise * self.points as f64 + 1e-9).floor() as usize
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn generate_planes_report(cfg: &PlanesConfig) -> Result<(Dataset, NoiseReport)> {
    cfg.validate()?;
    let (m, d) = (cfg.points, cfg.features);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let direction = loop {
        let v: Vec<f64> = (0..d).map(|_| normal(&mut rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            break v.into_iter().map(|x| x / norm).collect::<Vec<_>>();
        }
    };
    let offset: f64 = rng.random_range(-1.0..1.0);

    let mut classes: Vec<f64> = (0..m).map(|i| if i < m.div_ceil(2) { 1.0 } else { -1.0 }).collect();
    classes.shuffle(&mut rng);

    let mut points = Vec::with_capacity(m);
    for &side in &classes {
        let mut x: Vec<f64> = (0..d).map(|_| normal(&mut rng)).collect();
        let along: f64 = x.iter().zip(&direction).map(|(a, b)| a * b).sum();
        let across = offset + side * cfg.gap / 2.0 + NORMAL_SPREAD * normal(&mut rng);
        for (xi, &ni) in x.iter_mut().zip(&direction) {
            *xi += (across - along) * ni;
        }
        points.push(x);
    }

    let reassigned = cfg.noisy_labels();
    let mut changed = 0;
    for i in index::sample(&mut rng, m, reassigned) {
        let new = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        if new != classes[i] {
            changed += 1;
        }
        classes[i] = new;
    }

    let labels: Vec<&str> = classes.iter().map(|&c| if c > 0.0 { "1" } else { "-1" }).collect();
    let dataset = Dataset::from_labeled_points(&points, &labels, DEFAULT_BLOCK, DEFAULT_BLOCK)?;
    Ok((dataset, NoiseReport { reassigned, changed }))
}

pub fn generate_planes(m: usize, d: usize, noise: f64, gap: f64, seed: u64) -> Result<Dataset> {
    let cfg = PlanesConfig {
        points: m,
        features: d,
        noise,
        gap,
        seed,
    };
    Ok(generate_planes_report(&cfg)?.0)
}
