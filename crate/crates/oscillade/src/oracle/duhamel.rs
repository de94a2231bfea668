//! The integral form of the problem and its fixed-point solver.
//!
//! The evolution `du/dt = L u + alpha e^{iωt} u`, `u(0) = u0`, is
//! equivalent to the integral equation
//!
//! ```text
//! u(t) = e^{tL} u0 + (K u)(t),
//! (K v)(t) = ∫_0^t e^{(t-τ)L} alpha e^{iωτ} v(τ) dτ,
//! ```
//!
//! whose fixed-point iterates `u⁽ⁿ⁾ = e^{tL}u0 + K u⁽ⁿ⁻¹⁾` equal the
//! partial sums `Σ_{d≤n} K^d e^{tL} u0` and converge factorially in `n`.
//! Each iterate is cached on a fine uniform time mesh with cubic
//! interpolation in between, so one `K` application costs one quadrature
//! pass instead of recursing into all previous integrals.

use ndarray::Array1;
use num_complex::Complex64;

use crate::operators::fd_weights;
use crate::oracle::quadrature::{
    oscillatory_integral_try_vec, oscillatory_integral_vec, QuadratureSpec,
};
use crate::problems::ProblemSpec;
use crate::{Error, Result};

/// A vector-valued function of time cached on a uniform mesh over
/// `[0, t_star]`, with cubic 4-point interpolation between nodes.
#[derive(Clone, Debug)]
pub struct TimeSamples {
    times: Vec<f64>,
    values: Vec<Array1<Complex64>>,
}

impl TimeSamples {
    /// Sample `f` on `segments + 1` equispaced nodes covering
    /// `[0, t_star]`.  At least 3 segments are required for the cubic
    /// interpolant.
    pub fn from_fn(
        t_star: f64,
        segments: usize,
        f: impl Fn(f64) -> Array1<Complex64>,
    ) -> Result<Self> {
        if segments < 3 {
            return Err(Error::InsufficientData {
                what: "time mesh segments",
                got: segments,
                needed: 3,
            });
        }
        if !(t_star > 0.0) || !t_star.is_finite() {
            return Err(Error::InvalidParameter {
                what: "t_star",
                detail: format!("must be positive and finite, got {t_star}"),
            });
        }
        let times: Vec<f64> =
            (0..=segments).map(|j| t_star * j as f64 / segments as f64).collect();
        let values: Vec<Array1<Complex64>> = times.iter().map(|&t| f(t)).collect();
        Ok(TimeSamples { times, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Array1<Complex64>] {
        &self.values
    }

    pub fn t_star(&self) -> f64 {
        *self.times.last().expect("mesh is never empty")
    }

    pub fn segments(&self) -> usize {
        self.times.len() - 1
    }

    /// Cubic interpolation at `t` from the four nearest mesh nodes.
    pub fn eval(&self, t: f64) -> Array1<Complex64> {
        let n = self.times.len();
        let h = self.times[1] - self.times[0];
        let cell = ((t - self.times[0]) / h).floor() as isize;
        let start = (cell - 1).clamp(0, n as isize - 4) as usize;
        let nodes = &self.times[start..start + 4];
        let w = fd_weights(nodes, t, 0);
        let mut out = Array1::<Complex64>::zeros(self.values[0].len());
        for (j, &wj) in w.iter().enumerate() {
            out.scaled_add(Complex64::new(wj, 0.0), &self.values[start + j]);
        }
        out
    }

    /// Node-wise sum with another function on the identical mesh.
    pub fn add(&self, other: &TimeSamples) -> Result<TimeSamples> {
        if self.times != other.times {
            return Err(Error::DimensionMismatch {
                left: self.times.len(),
                right: other.times.len(),
                context: "time meshes",
            });
        }
        let values = self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| a + b)
            .collect();
        Ok(TimeSamples { times: self.times.clone(), values })
    }
}

/// Default mesh resolution: 64 segments per oscillation period, at least
/// 256 and at most 65536 in total.
pub fn default_mesh_segments(omega: f64, t_star: f64) -> usize {
    let periods = (omega.abs() * t_star / std::f64::consts::TAU).ceil().max(1.0);
    ((64.0 * periods) as usize).clamp(256, 65536)
}

/// Evaluate `(K v)(t) = ∫_0^t e^{(t-τ)L} alpha e^{iωτ} v(τ) dτ`.
pub fn apply_k(
    prob: &ProblemSpec,
    spec: &QuadratureSpec,
    v: impl Fn(f64) -> Array1<Complex64>,
    t: f64,
) -> Result<Array1<Complex64>> {
    let diagonal: Option<Vec<Complex64>> = prob.alpha().is_diagonal(0.0).then(|| {
        (0..prob.dim()).map(|i| prob.alpha().entries()[[i, i]]).collect()
    });
    oscillatory_integral_vec(
        |tau| {
            let phase = prob.phase(tau);
            let mut w = v(tau);
            match &diagonal {
                Some(diag) => {
                    for (z, d) in w.iter_mut().zip(diag.iter()) {
                        *z *= d * phase;
                    }
                }
                None => {
                    w = prob.alpha().apply(&w);
                    w.mapv_inplace(|z| z * phase);
                }
            }
            prob.semigroup().apply(t - tau, &w)
        },
        0.0,
        t,
        prob.omega(),
        prob.dim(),
        spec,
    )
}

/// Apply `K` to a cached function, producing the result on the same mesh.
pub fn apply_k_sampled(
    prob: &ProblemSpec,
    spec: &QuadratureSpec,
    v: &TimeSamples,
) -> Result<TimeSamples> {
    let values = v
        .times()
        .iter()
        .map(|&t| apply_k(prob, spec, |tau| v.eval(tau), t))
        .collect::<Result<Vec<_>>>()?;
    Ok(TimeSamples { times: v.times().to_vec(), values })
}

/// The fixed-point iterates `u⁽⁰⁾, …, u⁽ⁿ⁾` of the integral equation.
pub struct NeumannIterates {
    iterates: Vec<TimeSamples>,
}

impl NeumannIterates {
    /// Number of stored iterates (`iterations + 1`).
    pub fn len(&self) -> usize {
        self.iterates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterates.is_empty()
    }

    /// The `j`-th iterate; `j = 0` is the free flow.
    pub fn iterate(&self, j: usize) -> &TimeSamples {
        &self.iterates[j]
    }

    pub fn last(&self) -> &TimeSamples {
        self.iterates.last().expect("at least the free flow is stored")
    }

    /// `‖u⁽ʲ⁺¹⁾ - u⁽ʲ⁾‖` in the problem's reporting norm, maximised over
    /// the mesh, for each consecutive pair.  Because
    /// `u⁽ʲ⁺¹⁾ = e^{tL}u0 + K u⁽ʲ⁾` by construction, these are exactly the
    /// fixed-point residuals of the iterates.
    pub fn successive_difference_norms(&self, prob: &ProblemSpec) -> Vec<f64> {
        self.iterates
            .windows(2)
            .map(|pair| {
                pair[0]
                    .values()
                    .iter()
                    .zip(pair[1].values().iter())
                    .map(|(a, b)| prob.y_norm(&(b - a)))
                    .fold(0.0f64, f64::max)
            })
            .collect()
    }

    /// Largest reporting-norm distance between iterate `j` and a reference
    /// function of time, over the mesh.
    pub fn max_error_vs(
        &self,
        prob: &ProblemSpec,
        j: usize,
        reference: impl Fn(f64) -> Array1<Complex64>,
    ) -> f64 {
        let samples = &self.iterates[j];
        samples
            .times()
            .iter()
            .zip(samples.values().iter())
            .map(|(&t, v)| prob.y_norm(&(v - &reference(t))))
            .fold(0.0f64, f64::max)
    }
}

/// `(K^d e^{tL} u0)(t)` by fully nested quadrature, with no caching or
/// interpolation anywhere: the reference for decomposition identities.
///
/// Cost grows like `panels^d`, so keep `d ≤ 2` and moderate frequencies.
pub fn duhamel_power(
    prob: &ProblemSpec,
    spec: &QuadratureSpec,
    d: usize,
    t: f64,
) -> Result<Array1<Complex64>> {
    if d == 0 {
        return Ok(prob.flow(t));
    }
    // The inner factor carries harmonics up to (d-1)·ω on top of the
    // explicit phase, so panels are sized for d·ω.
    oscillatory_integral_try_vec(
        |tau| {
            let inner = duhamel_power(prob, spec, d - 1, tau)?;
            let mut w = prob.alpha().apply(&inner);
            let phase = prob.phase(tau);
            w.mapv_inplace(|z| z * phase);
            Ok(prob.semigroup().apply(t - tau, &w))
        },
        0.0,
        t,
        d as f64 * prob.omega(),
        prob.dim(),
        spec,
    )
}

/// `K^d e^{tL} u0` on a uniform mesh, each power produced by one cached
/// quadrature pass over the previous one.  Cheaper than [`duhamel_power`]
/// by a factor of `panels^{d-1}/mesh`, at the price of the mesh's cubic
/// interpolation error; intended for magnitude studies, not identities.
pub fn duhamel_power_sampled(
    prob: &ProblemSpec,
    spec: &QuadratureSpec,
    d: usize,
    segments: usize,
) -> Result<TimeSamples> {
    let mut samples = TimeSamples::from_fn(prob.t_star(), segments, |t| prob.flow(t))?;
    for _ in 0..d {
        samples = apply_k_sampled(prob, spec, &samples)?;
    }
    Ok(samples)
}

/// Run `iterations` fixed-point steps on an explicit mesh.
pub fn neumann_solve_on_mesh(
    prob: &ProblemSpec,
    spec: &QuadratureSpec,
    iterations: usize,
    segments: usize,
) -> Result<NeumannIterates> {
    let flow = TimeSamples::from_fn(prob.t_star(), segments, |t| prob.flow(t))?;
    let mut iterates = vec![flow.clone()];
    for _ in 0..iterations {
        let forced = apply_k_sampled(prob, spec, iterates.last().expect("non-empty"))?;
        iterates.push(flow.add(&forced)?);
    }
    Ok(NeumannIterates { iterates })
}

/// Run `iterations` fixed-point steps on the default mesh for the
/// problem's frequency and horizon.
pub fn neumann_solve(
    prob: &ProblemSpec,
    spec: &QuadratureSpec,
    iterations: usize,
) -> Result<NeumannIterates> {
    let segments = default_mesh_segments(prob.omega(), prob.t_star());
    neumann_solve_on_mesh(prob, spec, iterations, segments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::exact::exact_heat_state;
    use crate::problems::{heat_problem, zero_forcing_problem};

    fn cubic_probe(t: f64) -> Array1<Complex64> {
        Array1::from_vec(vec![
            Complex64::new(t * t * t - 2.0 * t * t + 0.5, 0.0),
            Complex64::new(0.25 * t, t * t + t),
        ])
    }

    #[test]
    fn samples_interpolate_cubics_exactly() {
        let samples = TimeSamples::from_fn(1.0, 8, cubic_probe).unwrap();
        for &t in &[0.0, 0.137, 0.5, 0.93, 1.0] {
            let got = samples.eval(t);
            let want = cubic_probe(t);
            for (a, b) in got.iter().zip(want.iter()) {
                assert!((a - b).norm() < 1e-12, "mismatch at t={t}");
            }
        }
    }

    #[test]
    fn samples_reproduce_their_own_nodes() {
        let samples = TimeSamples::from_fn(1.0, 11, cubic_probe).unwrap();
        for (&t, v) in samples.times().iter().zip(samples.values().iter()) {
            let got = samples.eval(t);
            for (a, b) in got.iter().zip(v.iter()) {
                assert!((a - b).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn too_few_segments_are_rejected() {
        let err = TimeSamples::from_fn(1.0, 2, cubic_probe).unwrap_err();
        assert!(matches!(err, Error::InsufficientData { what: "time mesh segments", .. }));
    }

    #[test]
    fn apply_k_vanishes_without_input_operator() {
        let prob = zero_forcing_problem(10.0, 12).unwrap();
        let spec = QuadratureSpec::default();
        let got = apply_k(&prob, &spec, |t| prob.flow(t), 0.8).unwrap();
        assert!(got.iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn heat_k_on_free_flow_matches_closed_form() {
        // On the lowest sine mode with alpha ≡ 1,
        // (K e^{tL}u0)(t) = e^{tL}u0 · (e^{iωt} - 1)/(iω).
        let omega = 25.0;
        let prob = heat_problem(omega, 24).unwrap();
        let spec = QuadratureSpec::default();
        for &t in &[0.3, 1.0] {
            let got = apply_k(&prob, &spec, |tau| prob.flow(tau), t).unwrap();
            let z = (Complex64::new(0.0, omega * t).exp() - 1.0) / Complex64::new(0.0, omega);
            let want = prob.flow(t).mapv(|v| v * z);
            let err = prob.y_norm(&(&got - &want)) / prob.y_norm(&want);
            assert!(err < 1e-10, "relative error {err} at t={t}");
        }
    }

    #[test]
    fn zero_iterations_return_the_free_flow() {
        let prob = heat_problem(10.0, 12).unwrap();
        let spec = QuadratureSpec::default();
        let iterates = neumann_solve_on_mesh(&prob, &spec, 0, 16).unwrap();
        assert_eq!(iterates.len(), 1);
        let err = iterates.max_error_vs(&prob, 0, |t| prob.flow(t));
        assert!(err < 1e-14);
    }

    #[test]
    fn zero_forcing_iteration_is_stationary() {
        let prob = zero_forcing_problem(10.0, 12).unwrap();
        let spec = QuadratureSpec::default();
        let iterates = neumannsolve_small(&prob, &spec, 3);
        let diffs = iterates.successive_difference_norms(&prob);
        assert_eq!(diffs.len(), 3);
        assert!(diffs.iter().all(|&d| d < 1e-14));
        let err = iterates.max_error_vs(&prob, 3, |t| prob.flow(t));
        assert!(err < 1e-13);
    }

    fn neumannsolve_small(
        prob: &ProblemSpec,
        spec: &QuadratureSpec,
        n: usize,
    ) -> NeumannIterates {
        neumann_solve_on_mesh(prob, spec, n, 32).unwrap()
    }

    #[test]
    fn heat_iterates_converge_to_the_exact_solution() {
        let omega = 10.0;
        let prob = heat_problem(omega, 24).unwrap();
        let spec = QuadratureSpec::default();
        let iterates = neumann_solve(&prob, &spec, 6).unwrap();
        let errors: Vec<f64> = (0..iterates.len())
            .map(|j| {
                iterates.max_error_vs(&prob, j, |t| exact_heat_state(prob.grid(), t, omega))
            })
            .collect();
        for pair in errors.windows(2) {
            assert!(pair[1] < pair[0], "errors must decrease: {errors:?}");
        }
        assert!(
            errors.last().unwrap() <= &1e-6,
            "final iterate error {} above 1e-6",
            errors.last().unwrap()
        );
    }

    #[test]
    fn duhamel_powers_match_heat_closed_forms() {
        // On the lowest sine mode with alpha ≡ 1,
        // (K^d e^{tL}u0)(t) = e^{tL}u0 · z(t)^d / d!  with
        // z(t) = (e^{iωt} - 1)/(iω).
        let omega = 10.0;
        let prob = heat_problem(omega, 12).unwrap();
        let spec = QuadratureSpec::default();
        for &t in &[0.4, 1.0] {
            let z = (Complex64::new(0.0, omega * t).exp() - 1.0) / Complex64::new(0.0, omega);
            let flow = prob.flow(t);
            let zero = duhamel_power(&prob, &spec, 0, t).unwrap();
            assert!(prob.y_norm(&(&zero - &flow)) < 1e-14);
            let one = duhamel_power(&prob, &spec, 1, t).unwrap();
            let want1 = flow.mapv(|v| v * z);
            assert!(prob.y_norm(&(&one - &want1)) < 1e-11 * prob.y_norm(&want1));
            let two = duhamel_power(&prob, &spec, 2, t).unwrap();
            let want2 = flow.mapv(|v| v * z * z / 2.0);
            assert!(prob.y_norm(&(&two - &want2)) < 1e-9 * prob.y_norm(&want2));
        }
    }

    #[test]
    fn sampled_duhamel_power_tracks_the_nested_one() {
        let omega = 10.0;
        let prob = heat_problem(omega, 12).unwrap();
        let spec = QuadratureSpec::default();
        let sampled = duhamel_power_sampled(&prob, &spec, 2, 256).unwrap();
        for &t in &[0.35, 0.8] {
            let exact = duhamel_power(&prob, &spec, 2, t).unwrap();
            let got = sampled.eval(t);
            let rel = prob.y_norm(&(&got - &exact)) / prob.y_norm(&exact);
            assert!(rel < 1e-6, "sampled/nested disagreement {rel} at t={t}");
        }
    }

    #[test]
    fn successive_differences_decay_factorially() {
        // Each oscillatory integral contributes |e^{iωt}-1|/ω ≤ 2/ω, so
        // consecutive difference ratios fall like a constant over j; the
        // envelope below is several times looser than the observed 0.2/(j+2).
        let omega = 10.0;
        let prob = heat_problem(omega, 24).unwrap();
        let spec = QuadratureSpec::default();
        let iterates = neumann_solve(&prob, &spec, 6).unwrap();
        let diffs = iterates.successive_difference_norms(&prob);
        for j in 0..diffs.len() - 1 {
            let ratio = diffs[j + 1] / diffs[j];
            assert!(
                ratio <= 1.25 / (j as f64 + 2.0),
                "ratio {ratio} at j={j} outside the factorial envelope"
            );
        }
    }
}
