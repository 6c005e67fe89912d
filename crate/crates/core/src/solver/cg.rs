//! Conjugate gradients on a matrix-free symmetric positive definite operator.

use crate::error::{Error, Result};
use crate::matrix::Real;

/// Every this many iterations the residual is recomputed as `rhs - A x`
/// instead of being updated by recurrence.
pub const RESIDUAL_REFRESH_INTERVAL: usize = 50;

pub trait LinearOperator<T> {
    fn dim(&self) -> usize;
    fn apply(&self, v: &[T], out: &mut [T]) -> Result<()>;
}

/// Adapts a closure to [`LinearOperator`].
pub struct FnOperator<F> {
    dim: usize,
    f: F,
}

impl<F> FnOperator<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<T, F: Fn(&[T], &mut [T])> LinearOperator<T> for FnOperator<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, v: &[T], out: &mut [T]) -> Result<()> {
        (self.f)(v, out);
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CGTrace {
    pub iterations: usize,
    /// Euclidean residual norm before the first iteration and after each one.
    pub residual_norms: Vec<f64>,
    pub converged: bool,
}

impl CGTrace {
    pub fn final_residual(&self) -> f64 {
        *self.residual_norms.last().expect("trace holds the initial residual")
    }
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    let mut acc = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

/// Solves `A x = rhs` from `x = 0` until `|r| <= epsilon * |rhs|` or
/// `max_iterations` is hit.
pub fn cg_solve<T: Real, A: LinearOperator<T> + ?Sized>(
    op: &A,
    rhs: &[T],
    epsilon: f64,
    max_iterations: usize,
) -> Result<(Vec<T>, CGTrace)> {
    let n = op.dim();
    if rhs.len() != n {
        return Err(Error::Shape {
            expected: n,
            actual: rhs.len(),
        });
    }
    let mut x = vec![T::zero(); n];
    let mut r = rhs.to_vec();
    let mut delta = dot(&r, &r);
    let rhs_norm = delta.sqrt().as_f64();
    if !rhs_norm.is_finite() {
        return Err(Error::NumericalBreakdown { iteration: 0 });
    }
    let tolerance = epsilon * rhs_norm;
    let mut trace = CGTrace {
        iterations: 0,
        residual_norms: vec![rhs_norm],
        converged: rhs_norm <= tolerance,
    };
    if trace.converged {
        return Ok((x, trace));
    }

    let mut d = r.clone();
    let mut q = vec![T::zero(); n];
    while trace.iterations < max_iterations {
        let iteration = trace.iterations + 1;
        op.apply(&d, &mut q)?;
        let alpha = delta / dot(&d, &q);
        if !alpha.is_finite() {
            return Err(Error::NumericalBreakdown { iteration });
        }
        for (xi, &di) in x.iter_mut().zip(&d) {
            *xi += alpha * di;
        }
        if iteration.is_multiple_of(RESIDUAL_REFRESH_INTERVAL) {
            op.apply(&x, &mut q)?;
            for ((ri, &bi), &axi) in r.iter_mut().zip(rhs).zip(&q) {
                *ri = bi - axi;
            }
        } else {
            for (ri, &qi) in r.iter_mut().zip(&q) {
                *ri -= alpha * qi;
            }
        }
        let delta_new = dot(&r, &r);
        let norm = delta_new.sqrt().as_f64();
        if !norm.is_finite() {
            return Err(Error::NumericalBreakdown { iteration });
        }
        trace.iterations = iteration;
        trace.residual_norms.push(norm);
        if norm <= tolerance {
            trace.converged = true;
            break;
        }
        let beta = delta_new / delta;
        for (di, &ri) in d.iter_mut().zip(&r) {
            *di = ri + beta * *di;
        }
        delta = delta_new;
    }
    Ok((x, trace))
}
