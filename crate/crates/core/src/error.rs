//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by polynomial arithmetic, kernel evaluation, and the
/// feasibility solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("reflection profile too small on axis {axis}: degree {degree} > profile {profile}")]
    ProfileTooSmall {
        axis: usize,
        degree: usize,
        profile: usize,
    },

    #[error("constant term is zero; series inverse undefined")]
    ConstantTermZero,

    #[error("axis {axis} has truncation 1; backward shift would leave an empty grid")]
    EmptyShift { axis: usize },

    #[error("polynomial is not a monomial (expected exactly one nonzero coefficient)")]
    NotMonomial,

    #[error("monomial coefficient has modulus {modulus}, expected 1")]
    NotUnimodular { modulus: f64 },

    #[error("denominator vanishes on the validation grid near ({re}, {im}) axis values; min |p| = {min_abs}")]
    DenominatorZero { re: f64, im: f64, min_abs: f64 },

    #[error("modulus deviates from 1 on the torus grid by {max_dev}; input is not inner")]
    NotInner { max_dev: f64 },

    #[error("point lies outside the open polydisk: coordinate {axis} has modulus {modulus}")]
    PointOutsideDomain { axis: usize, modulus: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm})")]
    EigenNoConvergence { sweeps: usize, off_norm: f64 },

    #[error("matrices do not commute: commutator Frobenius norm {norm} exceeds tolerance {tol}")]
    NonCommuting { norm: f64, tol: f64 },

    #[error("matrix is not a contraction: spectral norm {norm} exceeds 1 + {tol}")]
    NotContraction { norm: f64, tol: f64 },

    #[error("blend parameter t = {t} outside [0, 1]")]
    InvalidBlend { t: f64 },

    #[error("feasibility solver hit the iteration cap after {iterations} iterations (affine residual {affine_residual}, min eigenvalue {min_eig})")]
    SolverStalled {
        iterations: usize,
        affine_residual: f64,
        min_eig: f64,
    },

    #[error("decomposition certificate failed: residual {residual} exceeds {limit}")]
    CertificateFailed { residual: f64, limit: f64 },

    #[error("denominator is not certified stable; test not applicable")]
    NotStable,

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
