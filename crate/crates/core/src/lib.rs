//! Binary least-squares SVM classification.
//!
//! Training solves the LS-SVM linear system with a matrix-free conjugate
//! gradient method. The system matrix is never stored; each product
//! regenerates its entries from the kernel in cache-sized tiles, exploits
//! symmetry, and runs on a configurable number of worker threads. For the
//! linear kernel the product can also be split feature-wise across
//! partitions.
//!
//! Data and model files follow the LIBSVM formats, and the `lssvm` binary
//! offers `train`, `predict`, `scale` and `generate` subcommands.
//!
//! ```
//! use lssvm::{train, predict::decision_value, Dataset, Parameter};
//!
//! let data = Dataset::from_labeled_points(
//!     &[vec![1.0], vec![2.0], vec![3.0]],
//!     &["1", "1", "-1"],
//!     8,
//!     8,
//! )
//! .unwrap();
//! let params = Parameter { epsilon: 1e-12, ..Parameter::default() };
//! let (model, trace) = train(&data, &params).unwrap();
//! assert!(trace.converged);
//! assert!((decision_value(&model, &[2.0]).unwrap() - 1.0 / 3.0).abs() < 1e-10);
//! ```

pub mod cli;
pub mod datagen;
pub mod dataset;
pub mod error;
pub mod io;
pub mod kernel;
pub mod matrix;
pub mod model;
pub mod param;
pub mod partition;
pub mod predict;
pub mod solver;

pub use dataset::{Dataset, Label, LabelMap};
pub use error::{Error, ParameterError, Result};
pub use kernel::{kernel_eval, KernelConfig, KernelKind};
pub use matrix::{build_feature_matrix, FeatureMatrix, Real};
pub use model::Model;
pub use param::{validate_parameters, Parameter, Precision};
pub use solver::{train, CGTrace};
