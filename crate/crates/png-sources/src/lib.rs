//! Polynuclear growth (PNG) with external sources.
//!
//! The crate covers the exact discrete dynamics and Monte Carlo ensembles,
//! the limit shapes and scaling frames, the limiting kernels (extended Airy,
//! the GOE² and F0 transition kernels, the Brownian edge kernel), Nyström
//! evaluation of Fredholm determinants, the Painlevé II / Baik-Rains route,
//! and the exact finite-N contour-integral kernel.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`). The aliases at
//! the bottom of this file fix the scalar to `f64`, which is what every
//! accuracy target in the test suite assumes.

pub mod analysis;
pub mod error;
pub mod finite_n;
pub mod fredholm;
pub mod geometry;
pub mod kernels;
pub mod linalg;
pub mod painleve;
pub mod png_model;
pub mod quadrature;
pub mod real;
pub mod special_functions;

pub use error::{Error, Result};
pub use real::Real;

pub type ModelParams = png_model::ModelParams<f64>;
pub type ScalingFrame = geometry::ScalingFrame<f64>;
pub type KernelSpec = kernels::KernelSpec<f64>;
pub type QuadratureGrid = fredholm::QuadratureGrid<f64>;
pub type DiscretizedOperator = fredholm::DiscretizedOperator<f64>;
pub type PainleveTable = painleve::PainleveTable<f64>;
pub type OmegaColumn = painleve::OmegaColumn<f64>;
pub type ContourConfig = finite_n::ContourConfig<f64>;
pub type EmpiricalSample = analysis::EmpiricalSample<f64>;

pub type ModelParams32 = png_model::ModelParams<f32>;
pub type ScalingFrame32 = geometry::ScalingFrame<f32>;
pub type PainleveTable32 = painleve::PainleveTable<f32>;
