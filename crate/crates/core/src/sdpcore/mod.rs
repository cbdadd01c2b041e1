//! Shared numerical engine: Hermitian eigendecomposition, PSD projection,
//! and affine-meets-PSD feasibility.

mod eig;
mod matrix;
mod solver;

pub use eig::{hermitian_eig, psd_project, spectral_norm, HermEig};
pub use matrix::{random_unitary, CMatrix, HermMatrix};
pub use solver::{
    affine_psd_feasibility, AffineConstraintSet, Equation, FeasStatus, FeasibilityResult,
    SolverConfig, Term,
};
