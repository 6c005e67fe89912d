//! LS-SVM training through the reduced linear system.
//!
//! With `Q_ij = k(x_i, x_j) + [i == j]/C` and the last point as anchor, the
//! bordered system `[Q 1; 1' 0] [alpha; b] = [y; 0]` reduces to
//! `Q~ alpha~ = y_head - y_last`, where `Q~` is symmetric positive definite.
//! `Q~` is never stored: the matvec regenerates it from the kernel and the
//! q cache on each product.

pub mod cg;
pub mod matvec;
pub mod qcache;
pub mod train;

pub use cg::{cg_solve, CGTrace, FnOperator, LinearOperator, RESIDUAL_REFRESH_INTERVAL};
pub use matvec::{matvec_qtilde, ImplicitQTilde};
pub use qcache::{precompute_q, qtilde_entry, QCache};
pub use train::{assemble_weights, recover_bias, train};
