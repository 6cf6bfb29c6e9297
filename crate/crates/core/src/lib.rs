//! Executable constructions for spaces of continuous functions and their
//! multiplier algebras.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`geometry`] | finite metric spaces, `dil`, Lipschitz norms and dual norms |
//! | [`kernels`] | kernel expression algebra, Gram matrices, PSD tests |
//! | [`multipliers`] | sampled multiplier norms, contraction and von Neumann checks |
//! | [`realization`] | realization of a sequence model by Lipschitz functions |
//! | [`hardy_pick`] | Toeplitz matrices, Pick interpolation, Carleson probes |
//!
//! The numerical code is generic over [`scalar::Real`] (`f32`, `f64`); the
//! metric and realization code only needs [`scalar::Field`] and also runs in
//! exact rational arithmetic. The aliases below fix the usual choices.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod geometry;
pub mod hardy_pick;
pub mod kernels;
pub mod linalg;
pub mod multipliers;
pub mod realization;
pub mod scalar;

pub use error::{Error, Result};
pub use num_complex::Complex;
pub use num_rational::BigRational;

pub type C64 = Complex<f64>;

pub type Metric = geometry::MetricSpace<f64>;
pub type ExactMetric = geometry::MetricSpace<BigRational>;
pub type Sampled = geometry::SampledFunction<C64>;
pub type PointSet = kernels::EuclideanPointSet<f64>;
pub type Kernel = kernels::KernelExpr<f64>;
pub type Symbol = kernels::ClosedFormFunction<f64>;
pub type Gram = kernels::GramMatrix<f64>;
pub type Psd = kernels::PsdReport<f64>;
pub type Matrix = linalg::CMatrix<f64>;
pub type MultNorm = multipliers::MultNormReport<f64>;
pub type Model = realization::RealizationModel<f64>;
pub type ExactModel = realization::RealizationModel<BigRational>;
pub type Pick = hardy_pick::PickProblem<f64>;
