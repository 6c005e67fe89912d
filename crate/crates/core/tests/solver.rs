mod common;

use common::*;
use lssvm::partition::PartitionedQTilde;
use lssvm::predict::decision_value;
use lssvm::solver::{cg_solve, matvec_qtilde, precompute_q, qtilde_entry, FnOperator, LinearOperator};
use lssvm::{train, FeatureMatrix, KernelConfig, Parameter, Precision};
use proptest::prelude::*;

fn kernels() -> [KernelConfig; 3] {
    [
        KernelConfig::linear(),
        KernelConfig::polynomial(1.0, 2, 1.0),
        KernelConfig::radial(0.5),
    ]
}

#[test]
fn training_matches_dense_solve() {
    let mut seed = 0;
    for k in kernels() {
        for cost in [0.1, 1.0, 10.0] {
            seed += 1;
            let data = random_dataset(seed, 20, 3, 8, 8);
            let params = Parameter {
                epsilon: 1e-13,
                cost,
                max_iterations: Some(400),
                ..Parameter::with_kernel(k)
            };
            let (model, trace) = train(&data, &params).unwrap();
            assert!(trace.converged, "{k:?} C={cost}");
            let (alpha, b) = full_system_solve(&rows(&data), &data.label_values(), &k, cost);
            let mut ours = model.weights.clone();
            ours.push(model.bias);
            let mut oracle = alpha;
            oracle.push(b);
            assert!(rel_err(&ours, &oracle) < 1e-8, "{k:?} C={cost}");
            assert!(model.check_invariants());
        }
    }
}

#[test]
fn training_points_are_fit_up_to_the_regularizer() {
    // Q alpha + b = y, with Q = K + I/C
    let data = random_dataset(3, 15, 4, 8, 8);
    let k = KernelConfig::radial(0.7);
    let params = Parameter {
        epsilon: 1e-13,
        cost: 2.0,
        max_iterations: Some(200),
        ..Parameter::with_kernel(k)
    };
    let (model, _) = train(&data, &params).unwrap();
    let pts = rows(&data);
    let y = data.label_values();
    for i in 0..pts.len() {
        let f = decision_value(&model, &pts[i]).unwrap();
        assert!((f + model.weights[i] / 2.0 - y[i]).abs() < 1e-9);
    }
}

#[test]
fn matvec_against_dense_qtilde() {
    for k in kernels() {
        for (m, block) in [(5, 1), (9, 3), (40, 8), (70, 17)] {
            let data = random_dataset(m as u64, m, 6, block, block);
            let features = data.features();
            let cache = precompute_q(features, &k, 0.5).unwrap();
            let dense = dense_qtilde(&rows(&data), &k, 0.5);
            let v: Vec<f64> = (0..m - 1).map(|i| (i as f64 * 0.37).sin()).collect();
            let expected = naive_matvec(&dense, &v);
            for workers in [1, 2, 3] {
                let got = matvec_qtilde(features, &cache, &k, 0.5, &v, workers).unwrap();
                assert!(rel_err(&got, &expected) < 1e-12, "{k:?} m={m} block={block}");
            }
        }
    }
}

#[test]
fn entry_oracle_matches_dense_qtilde() {
    let data = random_dataset(8, 11, 3, 4, 2);
    let k = KernelConfig::polynomial(0.3, 3, -0.5);
    let cache = precompute_q(data.features(), &k, 4.0).unwrap();
    let dense = dense_qtilde(&rows(&data), &k, 4.0);
    for i in 0..10 {
        for j in 0..10 {
            let e = qtilde_entry(data.features(), &cache, &k, 4.0, i, j).unwrap();
            assert!((e - dense[(i, j)]).abs() < 1e-12 * dense[(i, j)].abs().max(1.0));
        }
    }
}

#[test]
fn single_precision_is_close_to_double() {
    let data = random_dataset(21, 40, 5, 8, 8);
    let k = KernelConfig::radial(0.5);
    let base = Parameter {
        epsilon: 1e-5,
        ..Parameter::with_kernel(k)
    };
    let (double, _) = train(&data, &base).unwrap();
    let (single, _) = train(
        &data,
        &Parameter {
            precision: Precision::Single,
            ..base
        },
    )
    .unwrap();
    let test = random_points(&mut rng(5), 20, 5);
    for x in &test {
        let a = decision_value(&double, x).unwrap();
        let b = decision_value(&single, x).unwrap();
        assert!((a - b).abs() < 1e-3 * (1.0 + a.abs()));
    }
}

#[test]
fn cg_trace_records_every_iteration() {
    let data = random_dataset(2, 50, 4, 8, 8);
    let params = Parameter {
        kernel: KernelConfig::radial(1.0),
        epsilon: 1e-8,
        ..Parameter::default()
    };
    let (_, trace) = train(&data, &params).unwrap();
    assert_eq!(trace.residual_norms.len(), trace.iterations + 1);
    assert!(trace.converged);
    assert!(trace.final_residual() <= 1e-8 * trace.residual_norms[0]);
}

#[test]
fn iteration_cap_reports_non_convergence() {
    let data = random_dataset(2, 50, 4, 8, 8);
    let params = Parameter {
        kernel: KernelConfig::radial(1.0),
        epsilon: 1e-14,
        max_iterations: Some(3),
        ..Parameter::default()
    };
    let (model, trace) = train(&data, &params).unwrap();
    assert_eq!(trace.iterations, 3);
    assert!(!trace.converged);
    assert!(model.check_invariants());
}

#[test]
fn partitioned_operator_matches_full() {
    let data = random_dataset(31, 60, 13, 8, 4);
    let k = KernelConfig::linear();
    let cache = precompute_q(data.features(), &k, 1.5).unwrap();
    let v: Vec<f64> = (0..59).map(|i| 1.0 / (1.0 + i as f64)).collect();
    let full = matvec_qtilde(data.features(), &cache, &k, 1.5, &v, 1).unwrap();
    for p in [1, 2, 3, 4, 13] {
        for threads in [1, 4] {
            let op = PartitionedQTilde::new(data.features(), &k, 1.5, p, threads).unwrap();
            let mut out = vec![0.0; 59];
            op.apply(&v, &mut out).unwrap();
            assert!(rel_err(&out, &full) < 1e-12, "p={p}");
        }
    }
    assert!(PartitionedQTilde::new(data.features(), &k, 1.5, 14, 1).is_err());
}

fn instance() -> impl Strategy<Value = (usize, usize, u64, usize)> {
    (3usize..24, 1usize..6, any::<u64>(), 0usize..3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn qtilde_is_symmetric_positive_definite((m, d, seed, ki) in instance(), cost in 0.05f64..20.0) {
        let data = random_dataset(seed, m, d, 8, 8);
        let q = dense_qtilde(&rows(&data), &kernels()[ki], cost);
        prop_assert!((&q - q.transpose()).amax() <= 1e-12 * q.amax());
        prop_assert!(q.cholesky().is_some());
    }

    #[test]
    fn block_sizes_do_not_change_the_product(
        (m, d, seed, ki) in instance(),
        rb in 1usize..20,
        fb in 1usize..20,
        workers in 1usize..5,
    ) {
        let k = kernels()[ki];
        let data = random_dataset(seed, m, d, 1, 1);
        let reference = {
            let cache = precompute_q(data.features(), &k, 1.0).unwrap();
            let v: Vec<f64> = (0..m - 1).map(|i| (i as f64).cos()).collect();
            (v.clone(), matvec_qtilde(data.features(), &cache, &k, 1.0, &v, 1).unwrap())
        };
        let blocked: FeatureMatrix = data.features().with_blocks(rb, fb).unwrap();
        let cache = precompute_q(&blocked, &k, 1.0).unwrap();
        let got = matvec_qtilde(&blocked, &cache, &k, 1.0, &reference.0, workers).unwrap();
        prop_assert!(rel_err(&got, &reference.1) <= 1e-12);
    }

    #[test]
    fn cg_meets_its_residual_contract(n in 1usize..30, seed in any::<u64>(), eps_exp in 2i32..12) {
        let mut r = rng(seed);
        let b = nalgebra::DMatrix::from_fn(n, n, |_, _| rand::Rng::random_range(&mut r, -1.0..1.0));
        let a = &b * b.transpose() + nalgebra::DMatrix::identity(n, n);
        let rhs: Vec<f64> = (0..n).map(|i| (i as f64 + 1.0).ln() - 0.5).collect();
        let op = FnOperator::new(n, |v: &[f64], out: &mut [f64]| out.copy_from_slice(&naive_matvec(&a, v)));
        let eps = 10f64.powi(-eps_exp);
        let (x, trace) = cg_solve(&op, &rhs, eps, 10 * n).unwrap();
        let ax = naive_matvec(&a, &x);
        let true_res = ax.iter().zip(&rhs).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
        let rhs_norm = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!(trace.converged);
        prop_assert!(trace.final_residual() <= eps * rhs_norm);
        // the recurrence residual may drift a little from the true one
        prop_assert!(true_res <= 10.0 * eps * rhs_norm + 1e-13 * rhs_norm);
    }

    #[test]
    fn smaller_epsilon_never_takes_fewer_iterations((m, d, seed, ki) in instance()) {
        let data = random_dataset(seed, m, d, 8, 8);
        let mut last = 0;
        for exp in 1..=10 {
            let params = Parameter {
                epsilon: 10f64.powi(-exp),
                max_iterations: Some(10 * m),
                ..Parameter::with_kernel(kernels()[ki])
            };
            let (_, trace) = train(&data, &params).unwrap();
            prop_assert!(trace.iterations >= last);
            last = trace.iterations;
        }
    }

    #[test]
    fn partitions_agree_on_decisions(m in 4usize..40, d in 1usize..12, seed in any::<u64>(), threads in 1usize..4) {
        let data = random_dataset(seed, m, d, 8, 8);
        let params = Parameter { epsilon: 1e-12, max_iterations: Some(10 * m), threads, ..Parameter::default() };
        let (one, _) = train(&data, &params).unwrap();
        let probe = random_points(&mut rng(seed ^ 1), 5, d);
        for p in 2..=d.min(4) {
            let (model, _) = train(&data, &Parameter { partitions: p, ..params }).unwrap();
            for x in &probe {
                let a = decision_value(&one, x).unwrap();
                let b = decision_value(&model, x).unwrap();
                prop_assert!((a - b).abs() <= 1e-8 * a.abs().max(1.0));
            }
        }
    }

    #[test]
    fn trained_weights_sum_to_zero((m, d, seed, ki) in instance(), cost in 0.1f64..10.0) {
        let data = random_dataset(seed, m, d, 8, 8);
        let params = Parameter { cost, epsilon: 1e-4, ..Parameter::with_kernel(kernels()[ki]) };
        let (model, _) = train(&data, &params).unwrap();
        prop_assert!(model.check_invariants());
        prop_assert_eq!(model.weights.len(), m);
    }
}
