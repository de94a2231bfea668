//! Ready-made problem setups.
//!
//! A [`ProblemSpec`] bundles everything a solver needs about one linear
//! evolution equation with an oscillatory multiplicative input,
//!
//! ```text
//! d/dt u(t) = L u(t) + alpha e^{i omega t} u(t),   u(0) = u0,   t in [0, t_star],
//! ```
//!
//! namely the spatial grid, the generator `L`, the multiplication operator
//! `alpha`, the initial vector, the frequency, the horizon, a semigroup
//! evaluator for `e^{tL}`, and the spatial window on which errors are
//! reported.
//!
//! Two concrete setups are provided:
//!
//! * [`heat_problem`] — damped heat flow on `[0, pi]` with homogeneous
//!   Dirichlet ends, `alpha ≡ 1`, and `u0(x) = sin(x) e^{-i/omega}`.  The
//!   Laplacian is represented in its sine eigenbasis, so `e^{tL}` is exact
//!   on every resolved mode.
//! * [`transport_problem`] — one-way transport `d/dt u = du/dx + alpha u`
//!   with `alpha(x) = cos(c (x^2 + x))` and `u0(x) = x`.  The physical
//!   window is `[-1, 1]`; the grid extends to `2.5` so that every
//!   characteristic `x + t` with `t <= 1` stays well inside the mesh, and
//!   `e^{tL}` is evaluated as an interpolating shift.
//!
//! [`zero_forcing_problem`] is a canary: `alpha ≡ 0`, for which every
//! solver must reproduce the free flow `e^{tL} u0` to within its own
//! tolerance.  [`dense_probe_problem`] draws small random dense setups
//! with no special structure at all, for verifying operator identities
//! at round-off accuracy.

use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::operators::{
    build_grid, fd_derivative_matrix, multiplication_operator, sine_eigensystem,
    sine_spectral_laplacian, BoundaryKind, Grid, OperatorMatrix, SemigroupEvaluator,
};
use crate::{Error, Result};

/// Default number of interior modes/points for the heat setup.
pub const HEAT_DEFAULT_MODES: usize = 64;

/// Default point count for the transport setup: spacing `3.5/448 = 1/128`
/// is exactly representable, which keeps shifted interpolation nodes free
/// of cumulative rounding drift.
pub const TRANSPORT_DEFAULT_POINTS: usize = 449;

/// Interpolation stencil width used by the transport shift semigroup and
/// the accuracy order of its finite-difference generator.
pub const TRANSPORT_STENCIL: usize = 8;

/// Full data of one oscillatory-input problem.
pub struct ProblemSpec {
    grid: Arc<Grid>,
    l: OperatorMatrix,
    alpha: OperatorMatrix,
    u0: Array1<Complex64>,
    omega: f64,
    t_star: f64,
    semigroup: Arc<SemigroupEvaluator>,
    window: (f64, f64),
    label: String,
}

impl std::fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("label", &self.label)
            .field("dim", &self.grid.len())
            .field("omega", &self.omega)
            .field("t_star", &self.t_star)
            .field("window", &self.window)
            .finish()
    }
}

impl ProblemSpec {
    /// Validate and assemble a problem description.
    ///
    /// Requires `omega > 0`, `t_star > 0`, a non-degenerate reporting
    /// window, and consistent dimensions across `l`, `alpha`, `u0`, the
    /// grid, and the semigroup evaluator.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        grid: Arc<Grid>,
        l: OperatorMatrix,
        alpha: OperatorMatrix,
        u0: Array1<Complex64>,
        omega: f64,
        t_star: f64,
        semigroup: Arc<SemigroupEvaluator>,
        window: (f64, f64),
        label: impl Into<String>,
    ) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidParameter {
                what: "omega",
                detail: format!("must be positive and finite, got {omega}"),
            });
        }
        if !(t_star > 0.0) || !t_star.is_finite() {
            return Err(Error::InvalidParameter {
                what: "t_star",
                detail: format!("must be positive and finite, got {t_star}"),
            });
        }
        if !(window.0 < window.1) {
            return Err(Error::InvalidParameter {
                what: "window",
                detail: format!("must satisfy lo < hi, got [{}, {}]", window.0, window.1),
            });
        }
        let m = grid.len();
        for (dim, name) in [
            (l.dim(), "generator"),
            (alpha.dim(), "input operator"),
            (u0.len(), "initial vector"),
            (semigroup.dim(), "semigroup"),
        ] {
            if dim != m {
                return Err(Error::DimensionMismatch { left: dim, right: m, context: name });
            }
        }
        Ok(ProblemSpec {
            grid,
            l,
            alpha,
            u0,
            omega,
            t_star,
            semigroup,
            window,
            label: label.into(),
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn l(&self) -> &OperatorMatrix {
        &self.l
    }

    pub fn alpha(&self) -> &OperatorMatrix {
        &self.alpha
    }

    pub fn u0(&self) -> &Array1<Complex64> {
        &self.u0
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn t_star(&self) -> f64 {
        self.t_star
    }

    pub fn semigroup(&self) -> &Arc<SemigroupEvaluator> {
        &self.semigroup
    }

    /// Spatial window `[lo, hi]` on which errors are reported.
    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.grid.len()
    }

    /// Free flow `e^{tL} u0`.
    pub fn flow(&self, t: f64) -> Array1<Complex64> {
        self.semigroup.apply(t, &self.u0)
    }

    /// The scalar modulation `e^{i omega t}` of the input term.
    pub fn phase(&self, t: f64) -> Complex64 {
        Complex64::new(0.0, self.omega * t).exp()
    }

    /// Weighted discrete L2 norm restricted to the reporting window.
    pub fn y_norm(&self, v: &Array1<Complex64>) -> f64 {
        self.grid.windowed_norm(v, self.window.0, self.window.1)
    }
}

/// Damped heat flow on `[0, pi]` with Dirichlet ends and `alpha ≡ 1`:
///
/// ```text
/// d/dt u = Lap u + e^{i omega t} u,   u(x, 0) = sin(x) e^{-i/omega}.
/// ```
///
/// `modes` interior points = number of resolved sine modes.  The
/// semigroup runs in the analytic sine eigenbasis, which the constructor
/// validates against the assembled generator before accepting it.
pub fn heat_problem(omega: f64, modes: usize) -> Result<ProblemSpec> {
    let grid = build_grid(0.0, PI, modes, BoundaryKind::Dirichlet)?;
    let l = sine_spectral_laplacian(&grid)?;
    let (basis, eigenvalues) = sine_eigensystem(&grid)?;
    // The sine basis matrix is symmetric and orthonormal, so it equals its
    // own inverse; the residual check inside `from_eigenpairs` still
    // verifies that claim against the generator.
    let inverse = basis.clone();
    let semigroup = Arc::new(SemigroupEvaluator::from_eigenpairs(&l, basis, inverse, eigenvalues)?);
    let alpha = multiplication_operator(|_| Complex64::new(1.0, 0.0), &grid)?;
    let amplitude = (-Complex64::i() / omega).exp();
    let u0 = Array1::from_iter(grid.points().iter().map(|&x| amplitude * x.sin()));
    ProblemSpec::new(
        grid,
        l,
        alpha,
        u0,
        omega,
        1.0,
        semigroup,
        (0.0, PI),
        format!("heat omega={omega}"),
    )
}

/// One-way transport on the extended mesh `[-1, 2.5]`:
///
/// ```text
/// d/dt u = du/dx + cos(c (x^2 + x)) e^{i omega t} u,   u(x, 0) = x,
/// ```
///
/// reported on the physical window `[-1, 1]`.  The extra `[1, 2.5]`
/// margin keeps every characteristic `x + t`, `t <= t_star = 1`, inside
/// the mesh for window points, and isolates the clamped rows near the
/// outflow end from the reported values.
pub fn transport_problem(omega: f64, c: f64, points: usize) -> Result<ProblemSpec> {
    let grid = build_grid(-1.0, 2.5, points, BoundaryKind::Extended)?;
    let l = fd_derivative_matrix(&grid, 1, TRANSPORT_STENCIL)?;
    let semigroup = Arc::new(SemigroupEvaluator::advection_shift(&grid, TRANSPORT_STENCIL)?);
    let alpha = multiplication_operator(
        move |x| Complex64::new((c * (x * x + x)).cos(), 0.0),
        &grid,
    )?;
    let u0 = Array1::from_iter(grid.points().iter().map(|&x| Complex64::new(x, 0.0)));
    ProblemSpec::new(
        grid,
        l,
        alpha,
        u0,
        omega,
        1.0,
        semigroup,
        (-1.0, 1.0),
        format!("transport c={c} omega={omega}"),
    )
}

/// Small dense random setup for validating operator identities.
///
/// Draws a generator, an input operator, and an initial vector with
/// entries uniform in the complex unit square (scaled to keep the flow
/// tame on `t <= 1`), and exponentiates by scaling-and-squaring, so the
/// only inexactness anywhere is floating-point round-off.  None of the
/// structure the worked examples happen to have (self-adjointness,
/// diagonal input operator, commuting brackets) survives the draw, which
/// is the point: identities verified on these setups hold for the
/// operators themselves, not for a special case.  Deterministic in
/// `seed`.
pub fn dense_probe_problem(omega: f64, dim: usize, seed: u64) -> Result<ProblemSpec> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let grid = build_grid(0.0, 1.0, dim, BoundaryKind::Extended)?;
    let mut draw_matrix = |label: &str, scale: f64| {
        let entries = Array2::from_shape_fn((dim, dim), |_| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale
        });
        OperatorMatrix::from_entries(entries, grid.clone(), label)
    };
    // ~unit spectral radius for L keeps e^{tL} well conditioned on [0, 1].
    let l = draw_matrix("random generator", 1.0 / dim as f64);
    let alpha = draw_matrix("random input operator", 0.5);
    let u0 = Array1::from_shape_fn(dim, |_| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let semigroup = Arc::new(SemigroupEvaluator::scaling_squaring(&l));
    ProblemSpec::new(
        grid,
        l,
        alpha,
        u0,
        omega,
        1.0,
        semigroup,
        (0.0, 1.0),
        format!("dense probe dim={dim} seed={seed}"),
    )
}

/// Heat-like setup with `alpha ≡ 0`.  Every solver must return the free
/// flow for it; used as a canary in solver tests.
pub fn zero_forcing_problem(omega: f64, modes: usize) -> Result<ProblemSpec> {
    let base = heat_problem(omega, modes)?;
    let alpha = OperatorMatrix::zeros(base.grid.clone());
    ProblemSpec::new(
        base.grid.clone(),
        base.l.clone(),
        alpha,
        base.u0.clone(),
        omega,
        base.t_star,
        base.semigroup.clone(),
        base.window,
        "zero-forcing canary",
    )
}
