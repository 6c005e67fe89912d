//! LIBSVM data and model files, and feature scaling.

pub mod format;
pub mod libsvm;
pub mod model_file;
pub mod scaling;

pub use format::{format_g, format_real};
pub use libsvm::{
    dataset_to_raw, parse_libsvm, parse_libsvm_raw, write_libsvm, write_libsvm_raw, RawData,
};
pub use model_file::{model_to_string, parse_model, write_model};
pub use scaling::{apply_scaling, fit_scaling, ScalingParams};
