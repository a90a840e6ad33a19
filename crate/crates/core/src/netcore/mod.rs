//! Minimal deterministic differentiable compute core.
//!
//! Networks are sequential [`NetSpec`]s evaluated one sample at a time. Image
//! tensors are `(channels, height, width)`, sequences `(time, features)`, and
//! vectors `(n)`. Every layer is generic over [`Real`] so the same code runs in
//! `f32` for training and in `f64` for finite-difference checks.

mod adam;
mod gemm;
mod gradcheck;
mod layers;
mod net;
mod param;
mod spec;
mod tensor;

use alloc::string::String;
use core::fmt::Debug;
use core::iter::Sum;
use core::ops::{AddAssign, MulAssign, SubAssign};

use num_traits::Float;
use thiserror::Error;

pub use adam::{Adam, AdamConfig};
pub use gradcheck::{grad_check, relative_error, CoordError, GradCheckOptions, GradCheckReport, NetProbe, Objective, ProbeLoss, REL_ERROR_FLOOR};
pub use layers::spp_pool;
pub use net::{Activations, Net};
pub use param::Param;
pub use spec::{ActivationKind, LayerSpec, NetSpec};
pub use tensor::Tensor;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetError {
    #[error("shape mismatch at layer {layer}: {reason}")]
    ShapeMismatch { layer: usize, reason: String },
    #[error("feature map {height}x{width} is smaller than pyramid level {level}")]
    TooSmall { height: usize, width: usize, level: usize },
    #[error("backward called without a matching forward pass: {0}")]
    State(String),
    #[error("invalid layer specification at layer {layer}: {reason}")]
    InvalidSpec { layer: usize, reason: String },
}

/// Floating-point element type of tensors and parameters.
pub trait Real:
    Float + Default + Debug + Send + Sync + AddAssign + SubAssign + MulAssign + Sum + 'static
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;

    /// `C = A B + beta C` on raw strided storage.
    ///
    /// # Safety
    /// Every index reachable through the dimensions and strides must lie
    /// inside the corresponding allocation.
    #[doc(hidden)]
    #[allow(clippy::too_many_arguments)]
    unsafe fn gemm_raw(
        m: usize,
        k: usize,
        n: usize,
        a: *const Self,
        rsa: isize,
        csa: isize,
        b: *const Self,
        rsb: isize,
        csb: isize,
        beta: Self,
        c: *mut Self,
        rsc: isize,
        csc: isize,
    );
}

impl Real for f32 {
    unsafe fn gemm_raw(
        m: usize,
        k: usize,
        n: usize,
        a: *const Self,
        rsa: isize,
        csa: isize,
        b: *const Self,
        rsb: isize,
        csb: isize,
        beta: Self,
        c: *mut Self,
        rsc: isize,
        csc: isize,
    ) {
        matrixmultiply::sgemm(m, k, n, 1.0, a, rsa, csa, b, rsb, csb, beta, c, rsc, csc);
    }

    fn from_f64(x: f64) -> Self {
        x as f32
    }
    fn to_f64(self) -> f64 {
        f64::from(self)
    }
}

impl Real for f64 {
    unsafe fn gemm_raw(
        m: usize,
        k: usize,
        n: usize,
        a: *const Self,
        rsa: isize,
        csa: isize,
        b: *const Self,
        rsb: isize,
        csb: isize,
        beta: Self,
        c: *mut Self,
        rsc: isize,
        csc: isize,
    ) {
        matrixmultiply::dgemm(m, k, n, 1.0, a, rsa, csa, b, rsb, csb, beta, c, rsc, csc);
    }

    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
}
