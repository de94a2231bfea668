//! Independent ground truths the expansion is judged against.
//!
//! Four unrelated routes to the same solution keep each other honest:
//!
//! * [`quadrature`] — deterministic composite Gauss panels sized to the
//!   oscillation period; every integral below goes through it.
//! * [`exact`] — the closed-form solutions of the two worked examples
//!   (separable heat decay; transport along characteristics).
//! * [`duhamel`] — the integral form of the equation and its fixed-point
//!   iterates, which converge factorially and independently of any
//!   frequency expansion.
//! * [`direct`] — a resolved second-order splitting integrator that makes
//!   no use of the problem's structure beyond the semigroup itself.

pub mod direct;
pub mod duhamel;
pub mod exact;
pub mod quadrature;

pub use direct::{direct_solve, MAX_TOTAL_STEPS, MIN_STEPS_PER_PERIOD};
pub use duhamel::{
    apply_k, apply_k_sampled, default_mesh_segments, duhamel_power, duhamel_power_sampled,
    neumann_solve, neumann_solve_on_mesh, NeumannIterates, TimeSamples,
};
pub use exact::{exact_heat, exact_heat_state, exact_transport, exact_transport_states};
pub use quadrature::{
    gauss_legendre, oscillatory_integral, oscillatory_integral_try_vec, oscillatory_integral_vec,
    QuadratureSpec,
};
