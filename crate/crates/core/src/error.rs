use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Rejections produced by [`crate::Parameter::validate`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParameterError {
    #[error("cost C must be positive, got {0}")]
    NonPositiveCost(f64),
    #[error("gamma must be positive, got {0}")]
    NonPositiveGamma(f64),
    #[error("polynomial degree must be at least 1")]
    InvalidDegree,
    #[error("coef0 must be finite, got {0}")]
    NonFiniteCoef0(f64),
    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(f64),
    #[error("block sizes must be at least 1")]
    ZeroBlock,
    #[error("partition count must be at least 1")]
    ZeroPartitions,
    #[error("thread count must be at least 1")]
    ZeroThreads,
    #[error("partitioning supports linear kernel only")]
    PartitionedNonlinearKernel,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty data: {0}")]
    EmptyData(String),
    #[error("malformed data: {0}")]
    MalformedData(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Parameter(#[from] ParameterError),
    #[error("shape mismatch: expected length {expected}, got {actual}")]
    Shape { expected: usize, actual: usize },
    #[error("index ({row}, {col}) out of range for a {size}x{size} system")]
    OutOfBounds { row: usize, col: usize, size: usize },
    #[error("numerical breakdown (non-finite value) at CG iteration {iteration}")]
    NumericalBreakdown { iteration: usize },
    #[error("cannot split {features} features into {partitions} partitions")]
    OverPartition { partitions: usize, features: usize },
    #[error("query point has a nonzero feature {index} but the model only has {model_features} features")]
    Dimension { index: usize, model_features: usize },
    #[error("test set contains no points")]
    EmptyTest,
    #[error("label {0:?} is not one of the model's labels")]
    UnknownLabel(String),
    #[error("invalid scaling range: lower {lo} must be below upper {hi}")]
    InvalidRange { lo: f64, hi: f64 },
    #[error("invalid generator parameter: {0}")]
    Generator(String),
    #[error("unknown kernel_type {0:?}")]
    UnknownKernel(String),
    #[error("model is missing mandatory field {0:?}")]
    MissingField(&'static str),
    #[error("unsupported class count {0}: only binary models are supported")]
    UnsupportedClassCount(usize),
    #[error("unsupported svm_type {0:?}: only c_svc is supported")]
    UnsupportedSvmType(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
