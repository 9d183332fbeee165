//! Numerical laboratory for the one-dimensional space-time fractional
//! nonlinear Schrödinger equation
//!
//! ```text
//! i^β ∂_t^β u = (-Δ)^{α/2} u + μ |u|^{p-1} u,     u(0) = f,
//! ```
//!
//! with a Caputo derivative of order β ∈ (0,1] in time and a fractional
//! Laplacian of order α in space. The linear flow is the Fourier multiplier
//! `E_β(i^{-β} t^β |ξ|^α)`; the nonlinear problem is the fixed point of a
//! memory-kernel integral equation whose kernel
//! `(t-τ)^{β-1} E_{β,β}(i^{-β}(t-τ)^β |ξ|^α)` forbids any semigroup
//! shortcut, so the solver convolves against the full history.
//!
//! The crate provides, module by module:
//!
//! * [`special`] — Gamma and Mittag-Leffler evaluation across the series,
//!   asymptotic and extended-precision regimes;
//! * [`grid`], [`field`] — periodic pseudo-spectral discretisation with
//!   dealiased power nonlinearities and Sobolev norms;
//! * [`propagator`] — the linear flow, its low/high-frequency operator
//!   decomposition with smooth cutoffs, and the remainder verification;
//! * [`mesh`], [`quad`], [`solver`] — graded time meshes, product
//!   integration of weakly singular kernels, the fixed-point solver, a
//!   discrete Caputo residual check and fractional integral calculus;
//! * [`norms`] — mixed space-time norms and randomized ratio tests of the
//!   smoothing/maximal estimate family;
//! * [`bspline`], [`illposed`] — the narrow-band data family, its second
//!   Picard iterate, the exact B-spline form of the band autocorrelation
//!   integral, and the frequency-growth experiments;
//! * [`run`] — the configuration-driven entry point behind the CLI.
//!
//! The `examples/` directory exercises each capability end to end; the
//! `fracnls` binary exposes the same labs as subcommands.

pub mod bspline;
pub mod error;
pub mod field;
pub mod grid;
pub mod illposed;
pub mod mesh;
pub mod norms;
pub mod params;
pub mod propagator;
pub mod quad;
pub mod report;
pub mod run;
pub mod solver;
pub mod special;

pub use error::{FieldError, IllposedError, MlError, ParamError, RunError, SolverError};
pub use field::SpectralField;
pub use grid::Grid;
pub use params::FracParams;
