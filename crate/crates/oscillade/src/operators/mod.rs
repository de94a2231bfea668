//! Spatial grids, dense operator matrices and semigroup evaluation.
//!
//! Everything downstream (commutator words, mode coefficients, reference
//! solvers) manipulates operators through this module: a one-dimensional
//! [`Grid`], dense complex [`OperatorMatrix`] values built from
//! finite-difference or spectral discretisations, and a
//! [`SemigroupEvaluator`] that applies `e^{tL}` by diagonalisation,
//! scaling-and-squaring, or (for constant-coefficient advection) an exact
//! shift along characteristics.

mod grid;
mod matrix;
mod semigroup;

pub use grid::{build_grid, BoundaryKind, Grid};
pub use matrix::{
    ad_power, commutator, discretize_operator, fd_derivative_matrix, fd_weights,
    multiplication_operator, sine_eigensystem, sine_spectral_laplacian, DerivativeTerm,
    OperatorMatrix,
};
pub use semigroup::{expm, lu_solve, SemigroupEvaluator, SemigroupMode};
