//! Numerical decompositions of rational inner functions on the bidisk.
//!
//! The crate computes and certifies decompositions of
//! `1 - phi(z) conj(phi(w))` into positive Gram kernels, tests when the
//! decomposition is unique, certifies stability of multivariate polynomials
//! on the closed polydisk, and decides two-variable interpolation
//! feasibility as an affine-meets-PSD problem.
//!
//! Modules:
//! - [`poly`]: dense multivariate polynomials and truncated series.
//! - [`sdpcore`]: Hermitian eigensolver, PSD projection, feasibility solver.
//! - [`kernels`]: kernel algebra, sampled positivity, blending, the
//!   commuting-contraction norm check.
//! - [`decompose`]: rational inner functions, Gram-pair construction,
//!   sum-of-squares extraction, uniqueness.
//! - [`stability`]: polydisk stability certificates.
//! - [`pick`]: interpolation feasibility.
//! - [`wire`]: JSON formats shared with the CLI.

pub mod decompose;
pub mod error;
pub mod kernels;
pub mod pick;
pub mod points;
pub mod poly;
pub mod sdpcore;
pub mod stability;
pub mod wire;

pub use error::{Error, Result};
