use crate::dataset::{Dataset, Label};
use crate::error::Result;
use crate::matrix::{FeatureMatrix, Real};
use crate::model::Model;
use crate::param::{Parameter, Precision};
use crate::partition::PartitionedQTilde;
use crate::solver::cg::{cg_solve, CGTrace};
use crate::solver::matvec::ImplicitQTilde;
use crate::solver::qcache::{precompute_q, QCache};

/// `b = y_last + q_mm * sum(alpha~) - <q, alpha~>`
pub fn recover_bias<T: Real>(cache: &QCache<T>, reduced: &[T], y_last: T) -> T {
    let mut sum = T::zero();
    let mut q_dot = T::zero();
    for (&a, &q) in reduced.iter().zip(&cache.q) {
        sum += a;
        q_dot += q * a;
    }
    y_last + cache.q_mm * sum - q_dot
}

/// Appends the last weight so that all weights sum to zero.
pub fn assemble_weights(reduced: &[f64]) -> Vec<f64> {
    let last = -reduced.iter().sum::<f64>();
    let mut weights = Vec::with_capacity(reduced.len() + 1);
    weights.extend_from_slice(reduced);
    weights.push(last);
    weights
}

/// Trains a model on `dataset`. The last point anchors the reduced system.
///
/// Running out of iterations is not an error: the model is returned and
/// `trace.converged` is false.
pub fn train(dataset: &Dataset, params: &Parameter) -> Result<(Model, CGTrace)> {
    params.validate()?;
    let features = dataset.features();
    let blocked;
    let features = if features.row_block() == params.row_block
        && features.feature_block() == params.feature_block
    {
        features
    } else {
        blocked = features.with_blocks(params.row_block, params.feature_block)?;
        &blocked
    };
    let (reduced, bias, trace) = match params.precision {
        Precision::Double => solve_reduced::<f64>(features, dataset.labels(), params)?,
        Precision::Single => solve_reduced::<f32>(&features.cast(), dataset.labels(), params)?,
    };

    let positives = dataset
        .labels()
        .iter()
        .filter(|&&l| l == Label::Positive)
        .count();
    let model = Model {
        kernel: params.kernel,
        support_points: dataset.features().clone(),
        weights: assemble_weights(&reduced),
        bias,
        label_map: dataset.label_map().clone(),
        class_counts: [positives, dataset.num_points() - positives],
    };
    Ok((model, trace))
}

fn solve_reduced<T: Real>(
    features: &FeatureMatrix<T>,
    labels: &[Label],
    params: &Parameter,
) -> Result<(Vec<f64>, f64, CGTrace)> {
    let m = features.num_points();
    let y_last = labels[m - 1].value();
    let rhs: Vec<T> = labels[..m - 1]
        .iter()
        .map(|l| T::of(l.value() - y_last))
        .collect();
    let max_iterations = params.max_iterations.unwrap_or(m - 1);

    let (reduced, trace, cache) = if params.partitions > 1 {
        let op = PartitionedQTilde::new(
            features,
            &params.kernel,
            params.cost,
            params.partitions,
            params.threads,
        )?;
        let (x, trace) = cg_solve(&op, &rhs, params.epsilon, max_iterations)?;
        (x, trace, op.combined_cache()?)
    } else {
        let cache = precompute_q(features, &params.kernel, params.cost)?;
        let op = ImplicitQTilde::new(features, &cache, params.kernel, params.cost)
            .with_workers(params.threads);
        let (x, trace) = cg_solve(&op, &rhs, params.epsilon, max_iterations)?;
        (x, trace, cache)
    };
    let bias = recover_bias(&cache, &reduced, T::of(y_last)).as_f64();
    Ok((reduced.iter().map(|a| a.as_f64()).collect(), bias, trace))
}
