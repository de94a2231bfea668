//! Closed-form reference solutions for the two worked examples.
//!
//! * Damped heat flow on `[0, π]` with `alpha ≡ 1` and
//!   `u0(x) = sin(x) e^{-i/ω}` has the separable solution
//!   `u(x,t) = exp(-t - i e^{iωt}/ω) sin(x)`.
//! * One-way transport with `alpha(x) = cos(c(x² + x))` and `u0(x) = x`
//!   solves along characteristics:
//!   `u(x,t) = u0(x+t) · exp(∫_0^t alpha(x+t-σ) e^{iωσ} dσ)`.
//!   The exponent is an oscillatory Gaussian-type integral; it is
//!   evaluated here by resolved panel quadrature instead of special
//!   functions of complex argument, which is analytically equivalent and
//!   keeps the error controllable.  Both forms are verified against the
//!   PDE itself by finite-difference residuals in the tests.

use ndarray::Array1;
use num_complex::Complex64;

use crate::operators::Grid;
use crate::oracle::quadrature::{oscillatory_integral, QuadratureSpec};
use crate::{Error, Result};

/// Exact damped-heat solution `exp(-t - i e^{iωt}/ω) sin(x)`.
pub fn exact_heat(x: f64, t: f64, omega: f64) -> Complex64 {
    let phase = Complex64::new(0.0, omega * t).exp();
    let exponent = Complex64::new(-t, 0.0) - Complex64::i() * phase / omega;
    exponent.exp() * x.sin()
}

/// [`exact_heat`] sampled on every grid point.
pub fn exact_heat_state(grid: &Grid, t: f64, omega: f64) -> Array1<Complex64> {
    Array1::from_iter(grid.points().iter().map(|&x| exact_heat(x, t, omega)))
}

/// The transport input profile `cos(c (x² + x))`.
fn transport_alpha(c: f64, y: f64) -> f64 {
    (c * (y * y + y)).cos()
}

/// Largest angular rate of the transport exponent's integrand on
/// `σ ∈ [0, t]`: the forcing phase `ω` plus the sweep rate of the cosine
/// profile along the characteristic.
fn transport_rate(x: f64, t: f64, omega: f64, c: f64) -> f64 {
    let profile = (2.0 * x + 1.0).abs().max((2.0 * (x + t) + 1.0).abs());
    omega.abs() + c.abs() * profile
}

/// Exact transport solution `(x + t) · exp(∫_0^t cos(c((x+t-σ)² + (x+t-σ))) e^{iωσ} dσ)`.
pub fn exact_transport(
    x: f64,
    t: f64,
    omega: f64,
    c: f64,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    let rate = transport_rate(x, t, omega, c);
    let exponent = oscillatory_integral(
        |s| Complex64::new(transport_alpha(c, x + t - s), 0.0) * Complex64::new(0.0, omega * s).exp(),
        0.0,
        t,
        rate,
        spec,
    )?;
    Ok(Complex64::new(x + t, 0.0) * exponent.exp())
}

/// [`exact_transport`] evaluated on a whole space/time sample batch.
///
/// Uses the equivalent cumulative form
/// `u(x, t) = (x + t) · exp(e^{iωt} G(x, t))` with
/// `G(x, t) = ∫_0^t alpha(x+s) e^{-iωs} ds`, so each requested time only
/// integrates over the new `[t_prev, t]` segment.  `times` must be
/// non-decreasing and non-negative.  Returns one state vector (over `xs`)
/// per requested time.
pub fn exact_transport_states(
    xs: &[f64],
    times: &[f64],
    omega: f64,
    c: f64,
    spec: &QuadratureSpec,
) -> Result<Vec<Array1<Complex64>>> {
    for pair in times.windows(2) {
        if pair[1] < pair[0] {
            return Err(Error::InvalidParameter {
                what: "times",
                detail: "must be non-decreasing".to_string(),
            });
        }
    }
    if times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::InvalidParameter {
            what: "times",
            detail: "must be non-negative".to_string(),
        });
    }
    let mut out = vec![Array1::<Complex64>::zeros(xs.len()); times.len()];
    let t_max = times.last().copied().unwrap_or(0.0);
    for (ix, &x) in xs.iter().enumerate() {
        let rate = transport_rate(x, t_max, omega, c);
        let mut cumulative = Complex64::default();
        let mut prev = 0.0f64;
        for (jt, &t) in times.iter().enumerate() {
            cumulative += oscillatory_integral(
                |s| {
                    Complex64::new(transport_alpha(c, x + s), 0.0)
                        * Complex64::new(0.0, -omega * s).exp()
                },
                prev,
                t,
                rate,
                spec,
            )?;
            prev = t;
            let phase = Complex64::new(0.0, omega * t).exp();
            out[jt][ix] = Complex64::new(x + t, 0.0) * (phase * cumulative).exp();
        }
    }
    Ok(out)
}
