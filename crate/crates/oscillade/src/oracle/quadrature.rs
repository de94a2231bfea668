//! Composite Gauss–Legendre quadrature sized for oscillatory integrands.
//!
//! Integrals of the form `∫ g(τ) dτ` where `g` oscillates with a known
//! angular frequency are resolved by splitting the interval into panels no
//! wider than a fixed fraction of the oscillation period (and never fewer
//! than 16 panels per interval), then applying a fixed-order Gauss rule on
//! each panel.  The rule is deterministic: the same inputs always produce
//! the same panel layout and the same nodes.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use ndarray::Array1;
use num_complex::Complex64;

use crate::{Error, Result};

/// Panel layout and tolerance settings for oscillatory integrals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    /// Minimum number of panels per oscillation period (default 8).
    pub panels_per_period: usize,
    /// Gauss–Legendre nodes per panel (default 10).
    pub points_per_panel: usize,
    /// Relative tolerance the layout is expected to reach; refinement
    /// checks compare against this (default 1e-10).
    pub rel_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { panels_per_period: 8, points_per_panel: 10, rel_tol: 1e-10 }
    }
}

impl QuadratureSpec {
    /// The same layout with twice as many panels per period, for
    /// self-consistency checks by refinement.
    pub fn refined(&self) -> QuadratureSpec {
        QuadratureSpec { panels_per_period: self.panels_per_period * 2, ..*self }
    }

    /// Number of equal panels used on `[a, b]` for angular frequency
    /// `frequency`: panel width never exceeds the smaller of one sixteenth
    /// of the interval and `2π / (|frequency| · panels_per_period)`.
    pub fn panel_count(&self, a: f64, b: f64, frequency: f64) -> usize {
        let len = b - a;
        if len <= 0.0 {
            return 0;
        }
        let mut width = len / 16.0;
        if frequency.abs() > 0.0 {
            width = width.min(std::f64::consts::TAU / (frequency.abs() * self.panels_per_period as f64));
        }
        (len / width).ceil() as usize
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, cached per point count.
///
/// Nodes are found by Newton iteration on the Legendre polynomial from the
/// Chebyshev-based initial guess; weights use `2 / ((1 - x²) P'ₙ(x)²)`.
pub fn gauss_legendre(n: usize) -> Result<Arc<(Vec<f64>, Vec<f64>)>> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            what: "points_per_panel",
            detail: "must be at least 1".to_string(),
        });
    }
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("gauss cache poisoned");
    if let Some(hit) = guard.get(&n) {
        return Ok(hit.clone());
    }
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate Pₙ and Pₙ' by the three-term recurrence.
            let mut p0 = 1.0f64;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    nodes.reverse();
    weights.reverse();
    let entry = Arc::new((nodes, weights));
    guard.insert(n, entry.clone());
    Ok(entry)
}

/// `∫_a^b g(τ) dτ` for scalar-valued `g` by composite Gauss panels.
///
/// `frequency` is the fastest angular frequency in the integrand and only
/// affects panel sizing.  An empty or reversed interval integrates to
/// zero; a non-finite result is rejected.
pub fn oscillatory_integral(
    g: impl Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    frequency: f64,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    if b <= a {
        return Ok(Complex64::default());
    }
    let (nodes, weights) = &*gauss_legendre(spec.points_per_panel)?;
    let panels = spec.panel_count(a, b, frequency);
    let width = (b - a) / panels as f64;
    let mut acc = Complex64::default();
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * width;
        let half = 0.5 * width;
        for (x, w) in nodes.iter().zip(weights.iter()) {
            acc += g(mid + half * x) * (w * half);
        }
    }
    if !acc.re.is_finite() || !acc.im.is_finite() {
        return Err(Error::NonFiniteSample { context: "oscillatory integral" });
    }
    Ok(acc)
}

/// `∫_a^b g(τ) dτ` for vector-valued `g`; same panel layout as the scalar
/// version.  `dim` fixes the output length when the interval is empty.
pub fn oscillatory_integral_vec(
    g: impl Fn(f64) -> Array1<Complex64>,
    a: f64,
    b: f64,
    frequency: f64,
    dim: usize,
    spec: &QuadratureSpec,
) -> Result<Array1<Complex64>> {
    oscillatory_integral_try_vec(|t| Ok(g(t)), a, b, frequency, dim, spec)
}

/// [`oscillatory_integral_vec`] for integrands that can themselves fail
/// (e.g. nested integrals); the first sample error aborts the panel scan.
pub fn oscillatory_integral_try_vec(
    g: impl Fn(f64) -> Result<Array1<Complex64>>,
    a: f64,
    b: f64,
    frequency: f64,
    dim: usize,
    spec: &QuadratureSpec,
) -> Result<Array1<Complex64>> {
    let mut acc = Array1::<Complex64>::zeros(dim);
    if b <= a {
        return Ok(acc);
    }
    let (nodes, weights) = &*gauss_legendre(spec.points_per_panel)?;
    let panels = spec.panel_count(a, b, frequency);
    let width = (b - a) / panels as f64;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * width;
        let half = 0.5 * width;
        for (x, w) in nodes.iter().zip(weights.iter()) {
            let sample = g(mid + half * x)?;
            if sample.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: sample.len(),
                    right: dim,
                    context: "integrand sample",
                });
            }
            acc.scaled_add(Complex64::new(w * half, 0.0), &sample);
        }
    }
    for z in acc.iter() {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NonFiniteSample { context: "oscillatory integral" });
        }
    }
    Ok(acc)
}
