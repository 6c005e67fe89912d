use crate::error::ParameterError;
use crate::kernel::{KernelConfig, KernelKind};
use crate::matrix::DEFAULT_BLOCK;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    Single,
    #[default]
    Double,
}

/// Training configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Parameter {
    pub kernel: KernelConfig,
    pub cost: f64,
    /// Relative residual bound for CG: stop once `|r| <= epsilon * |rhs|`.
    pub epsilon: f64,
    /// `None` means `m - 1`.
    pub max_iterations: Option<usize>,
    pub row_block: usize,
    pub feature_block: usize,
    pub partitions: usize,
    pub threads: usize,
    pub precision: Precision,
}

impl Default for Parameter {
    fn default() -> Self {
        Self {
            kernel: KernelConfig::linear(),
            cost: 1.0,
            epsilon: 1e-6,
            max_iterations: None,
            row_block: DEFAULT_BLOCK,
            feature_block: DEFAULT_BLOCK,
            partitions: 1,
            threads: 1,
            precision: Precision::Double,
        }
    }
}

impl Parameter {
    pub fn with_kernel(kernel: KernelConfig) -> Self {
        Self {
            kernel,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ParameterError> {
        validate_parameters(self)
    }
}

pub fn validate_parameters(p: &Parameter) -> Result<(), ParameterError> {
    if !(p.cost > 0.0 && p.cost.is_finite()) {
        return Err(ParameterError::NonPositiveCost(p.cost));
    }
    if p.kernel.kind != KernelKind::Linear && !(p.kernel.gamma > 0.0 && p.kernel.gamma.is_finite()) {
        return Err(ParameterError::NonPositiveGamma(p.kernel.gamma));
    }
    if p.kernel.kind == KernelKind::Polynomial {
        if p.kernel.degree < 1 {
            return Err(ParameterError::InvalidDegree);
        }
        if !p.kernel.coef0.is_finite() {
            return Err(ParameterError::NonFiniteCoef0(p.kernel.coef0));
        }
    }
    if !(p.epsilon > 0.0 && p.epsilon.is_finite()) {
        return Err(ParameterError::NonPositiveEpsilon(p.epsilon));
    }
    if p.row_block == 0 || p.feature_block == 0 {
        return Err(ParameterError::ZeroBlock);
    }
    if p.partitions == 0 {
        return Err(ParameterError::ZeroPartitions);
    }
    if p.threads == 0 {
        return Err(ParameterError::ZeroThreads);
    }
    if p.partitions > 1 && p.kernel.kind != KernelKind::Linear {
        return Err(ParameterError::PartitionedNonlinearKernel);
    }
    Ok(())
}
