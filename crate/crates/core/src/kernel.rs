//! Linear, polynomial and radial basis kernels.
//!
//! Every kernel is evaluated in two stages: a feature-ordered accumulation
//! (dot product or squared distance) followed by a scalar finishing step.
//! The blocked matvec in [`crate::solver`] reuses both stages, which keeps
//! its kernel values bit-identical to [`kernel_eval`].

use std::fmt;

use crate::matrix::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    Linear,
    Polynomial,
    Radial,
}

impl KernelKind {
    /// Name used in LIBSVM model files.
    pub fn libsvm_name(self) -> &'static str {
        match self {
            KernelKind::Linear => "linear",
            KernelKind::Polynomial => "polynomial",
            KernelKind::Radial => "rbf",
        }
    }

    pub fn from_libsvm_name(name: &str) -> Option<Self> {
        match name {
            "linear" => Some(KernelKind::Linear),
            "polynomial" => Some(KernelKind::Polynomial),
            "rbf" => Some(KernelKind::Radial),
            _ => None,
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.libsvm_name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConfig {
    pub kind: KernelKind,
    pub gamma: f64,
    pub degree: u32,
    pub coef0: f64,
}

impl KernelConfig {
    pub fn linear() -> Self {
        Self {
            kind: KernelKind::Linear,
            gamma: 1.0,
            degree: 1,
            coef0: 0.0,
        }
    }

    /// `(gamma * <x, z> + coef0)^degree`
    pub fn polynomial(gamma: f64, degree: u32, coef0: f64) -> Self {
        Self {
            kind: KernelKind::Polynomial,
            gamma,
            degree,
            coef0,
        }
    }

    /// `exp(-gamma * |x - z|^2)`
    pub fn radial(gamma: f64) -> Self {
        Self {
            kind: KernelKind::Radial,
            gamma,
            degree: 1,
            coef0: 0.0,
        }
    }

    /// True when the accumulation stage is a squared distance rather than a
    /// dot product.
    #[inline]
    pub fn uses_distance(&self) -> bool {
        self.kind == KernelKind::Radial
    }

    /// Maps an accumulated dot product (or squared distance for the radial
    /// kernel) to the kernel value.
    #[inline]
    pub fn finish<T: Real>(&self, acc: T) -> T {
        match self.kind {
            KernelKind::Linear => acc,
            KernelKind::Polynomial => {
                powi_by_squaring(T::of(self.gamma) * acc + T::of(self.coef0), self.degree)
            }
            KernelKind::Radial => (-T::of(self.gamma) * acc).exp(),
        }
    }

    pub fn eval<T: Real>(&self, x: &[T], z: &[T]) -> T {
        kernel_eval(self, x, z)
    }
}

#[inline]
pub(crate) fn dot_accumulate<T: Real>(x: &[T], z: &[T]) -> T {
    let mut acc = T::zero();
    for (&a, &b) in x.iter().zip(z) {
        acc += a * b;
    }
    acc
}

#[inline]
pub(crate) fn distance_accumulate<T: Real>(x: &[T], z: &[T]) -> T {
    let mut acc = T::zero();
    for (&a, &b) in x.iter().zip(z) {
        let diff = a - b;
        acc += diff * diff;
    }
    acc
}

/// Integer power by repeated squaring.
pub fn powi_by_squaring<T: Real>(base: T, exp: u32) -> T {
    let mut result = T::one();
    let mut b = base;
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result *= b;
        }
        e >>= 1;
        if e > 0 {
            b = b * b;
        }
    }
    result
}

/// Evaluates `cfg` on two equally long points.
pub fn kernel_eval<T: Real>(cfg: &KernelConfig, x: &[T], z: &[T]) -> T {
    debug_assert_eq!(x.len(), z.len());
    let acc = if cfg.uses_distance() {
        distance_accumulate(x, z)
    } else {
        dot_accumulate(x, z)
    };
    cfg.finish(acc)
}
