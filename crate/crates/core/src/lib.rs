//! Numerical filling of totally real tori by J-complex discs.
//!
//! For an almost complex structure on `𝔻 × ℂ` whose complex matrix is lower
//! triangular, the discs `z ↦ (z, w(z))` attached to a torus
//! `⋃_{|z|=1} {z} × γ_z` solve a quasilinear Beltrami-type equation. This
//! crate carries the whole pipeline on a polar spectral grid:
//!
//! - [`grid`], [`field`]: the grid, complex fields, norms and spectral
//!   Wirtinger derivatives;
//! - [`cauchy`]: the Cauchy–Green operator `T`, its boundary-normalized
//!   version `T₁` and `S₁ = ∂_z T₁`;
//! - [`coeffs`]: structure matrices, coefficient presets, fiber changes, the
//!   graph reduction and the exponential substitution;
//! - [`beltrami`]: linear solvers, the similarity decomposition and maximum
//!   principle measurements;
//! - [`disc`]: the nonlinear disc solver and its linearization;
//! - [`filling`]: torus normalization, `τ` sweeps and family certificates.
//!
//! Everything is generic over the real scalar ([`scalar::Real`], `f32` or
//! `f64`); the aliases below fix `f64`.

pub mod beltrami;
pub mod cauchy;
pub mod coeffs;
pub mod disc;
pub mod error;
pub mod field;
pub mod filling;
pub mod grid;
pub mod jet;
pub mod quadrature;
pub mod scalar;
pub mod smooth;

pub use error::{Error, Result};
pub use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type Grid = grid::DiscGrid<f64>;
pub type Field = field::ComplexField<f64>;
pub type Workspace = cauchy::OperatorWorkspace<f64>;
pub type Coefficients = coeffs::CoeffTriple<f64>;
pub type Graph = coeffs::GraphCoeffs<f64>;
pub type Preset = coeffs::Preset<f64>;
pub type FiberChange = coeffs::FiberChange<f64>;
pub type Torus = filling::TorusSpec<f64>;
pub type LinearProblem = beltrami::LinearProblem<f64>;
pub type LinearSolution = beltrami::LinearSolution<f64>;
pub type Similarity = beltrami::SimilarityCertificate<f64>;
pub type Disc = disc::DiscSolution<f64>;
pub type Family = filling::Hypersurface<f64>;
pub type Sweep = filling::Sweep<f64>;
