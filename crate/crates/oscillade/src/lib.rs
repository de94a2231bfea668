//! Modulated Fourier expansions for linear evolution equations driven by a
//! single-frequency oscillatory multiplicative term.
//!
//! The crate studies problems of the form
//!
//! ```text
//!     du/dt = L u + alpha(x) e^{i w t} u,     u(0) = u_0,
//! ```
//!
//! where `L` generates a semigroup (heat, transport, ...) and the forcing
//! oscillates at a large frequency `w`.  The solution admits an expansion in
//! inverse powers of the frequency,
//!
//! ```text
//!     u(t) ~ p_00(t) + sum_{r>=1} w^{-r} sum_{s=0..r} e^{s i w t} p_rs(t),
//! ```
//!
//! whose mode coefficients `p_rs` are built recursively from nested
//! commutators of `L` with the multiplication operator `alpha` and exact
//! rational weights.  Truncating after the `w^{-n}` block leaves a remainder
//! of size `O(w^{-(n+1)})` uniformly on bounded time windows; the point of
//! this crate is to construct the truncations, measure the remainders against
//! independent reference solvers, and verify the predicted decay rates.
//!
//! # Modules
//!
//! * [`operators`] — grids, dense operator matrices, commutators and
//!   semigroup evaluation (diagonalisation, scaling-and-squaring, shift).
//! * [`combinatorics`] — multi-index enumeration and the exact rational
//!   weight families produced by repeated integration by parts.
//! * [`opcalculus`] — nested commutator words and the recursive
//!   lower-boundary operators assembled from them.
//! * [`expansion`] — mode coefficients, truncated approximants and the
//!   series / remainder split of the iterated Duhamel terms.
//! * [`oracle`] — independent reference solvers: oscillatory quadrature,
//!   Neumann (Duhamel) iteration, exponential-midpoint stepping and closed
//!   forms for the two worked examples.
//! * [`problems`] — ready-made heat and transport model problems.
//! * [`study`] — frequency sweeps, decay-order fits, CSV/plot output and a
//!   self-check suite.
//!
//! # Runnable examples
//!
//! Each major capability has a runnable example:
//!
//! ```text
//! cargo run --release --example heat_order_study
//! cargo run --release --example transport_error_constants
//! cargo run --release --example coefficient_table
//! cargo run --release --example neumann_iterates
//! cargo run --release --example series_remainder_split
//! cargo run --release --example semigroup_modes
//! ```
//!
//! The same functionality is scriptable through the thin `oscillade` binary
//! (`study`, `coeffs`, `verify` subcommands); see the README.

pub mod combinatorics;
pub mod error;
pub mod expansion;
pub mod opcalculus;
pub mod operators;
pub mod oracle;
pub mod problems;
pub mod study;

pub use error::{Error, Result};
