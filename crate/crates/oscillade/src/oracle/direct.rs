//! Resolved direct time integrator, used as a cross-check where no
//! closed form is available.
//!
//! One step of size `h` advances the state with symmetric exponential
//! splitting,
//!
//! ```text
//! u ← e^{(h/2)L} · exp(h e^{iω t_mid} alpha) · e^{(h/2)L} u,
//! ```
//!
//! which is second-order accurate in `h` for the non-commuting pair
//! `(L, alpha)` and inherits the stability of the exact semigroup, so a
//! stiff generator does not limit the step size.  The step resolves the
//! forcing period: `steps_per_period` steps per `2π/ω` (at least 32).

use ndarray::Array1;
use num_complex::Complex64;

use crate::operators::expm;
use crate::problems::ProblemSpec;
use crate::{Error, Result};

/// Smallest accepted time resolution, in steps per forcing period.
pub const MIN_STEPS_PER_PERIOD: usize = 32;

/// Upper bound on the total number of steps in one solve.
pub const MAX_TOTAL_STEPS: usize = 1 << 26;

/// Integrate the problem and return the state at each requested time.
///
/// `record_times` must be non-decreasing and lie in `[0, t_star]`.  The
/// stepper subdivides each gap between consecutive record times into
/// equal steps no longer than `2π/(ω · steps_per_period)`, so every
/// record time is hit exactly.
pub fn direct_solve(
    prob: &ProblemSpec,
    steps_per_period: usize,
    record_times: &[f64],
) -> Result<Vec<Array1<Complex64>>> {
    if steps_per_period < MIN_STEPS_PER_PERIOD {
        return Err(Error::InvalidParameter {
            what: "steps_per_period",
            detail: format!("need at least {MIN_STEPS_PER_PERIOD}, got {steps_per_period}"),
        });
    }
    let t_star = prob.t_star();
    for pair in record_times.windows(2) {
        if pair[1] < pair[0] {
            return Err(Error::InvalidParameter {
                what: "record_times",
                detail: "must be non-decreasing".to_string(),
            });
        }
    }
    if record_times.iter().any(|&t| t < 0.0 || t > t_star * (1.0 + 1e-12)) {
        return Err(Error::InvalidParameter {
            what: "record_times",
            detail: format!("must lie in [0, {t_star}]"),
        });
    }
    let h_target = std::f64::consts::TAU / (prob.omega() * steps_per_period as f64);
    // Budget check before doing any work.
    let mut budget: usize = 0;
    let mut prev = 0.0f64;
    for &t in record_times {
        if t > prev {
            budget = budget.saturating_add(((t - prev) / h_target).ceil() as usize);
            prev = t;
        }
    }
    if budget > MAX_TOTAL_STEPS {
        return Err(Error::InvalidParameter {
            what: "steps_per_period",
            detail: format!("{budget} total steps exceed the budget of {MAX_TOTAL_STEPS}"),
        });
    }

    let diagonal: Option<Vec<Complex64>> = prob.alpha().is_diagonal(0.0).then(|| {
        (0..prob.dim()).map(|i| prob.alpha().entries()[[i, i]]).collect()
    });
    let mut state = prob.u0().clone();
    let mut now = 0.0f64;
    let mut out = Vec::with_capacity(record_times.len());
    for &target in record_times {
        if target > now {
            let steps = ((target - now) / h_target).ceil() as usize;
            let h = (target - now) / steps as f64;
            for k in 0..steps {
                let t_mid = now + (k as f64 + 0.5) * h;
                let gain = Complex64::new(0.0, prob.omega() * t_mid).exp()
                    * Complex64::new(h, 0.0);
                state = prob.semigroup().apply(0.5 * h, &state);
                match &diagonal {
                    Some(diag) => {
                        for (z, d) in state.iter_mut().zip(diag.iter()) {
                            *z *= (gain * d).exp();
                        }
                    }
                    None => {
                        let stepper = expm(&prob.alpha().entries().mapv(|e| e * gain));
                        state = stepper.dot(&state);
                    }
                }
                state = prob.semigroup().apply(0.5 * h, &state);
            }
            now = target;
        }
        out.push(state.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::exact::{exact_heat_state, exact_transport_states};
    use crate::oracle::quadrature::QuadratureSpec;
    use crate::problems::{
        heat_problem, transport_problem, zero_forcing_problem, TRANSPORT_DEFAULT_POINTS,
    };

    #[test]
    fn rejects_coarse_resolution_and_disorder() {
        let prob = heat_problem(10.0, 12).unwrap();
        assert!(matches!(
            direct_solve(&prob, 16, &[1.0]).unwrap_err(),
            Error::InvalidParameter { what: "steps_per_period", .. }
        ));
        assert!(matches!(
            direct_solve(&prob, 64, &[0.7, 0.2]).unwrap_err(),
            Error::InvalidParameter { what: "record_times", .. }
        ));
        assert!(matches!(
            direct_solve(&prob, 64, &[1.5]).unwrap_err(),
            Error::InvalidParameter { what: "record_times", .. }
        ));
    }

    #[test]
    fn zero_forcing_reproduces_the_free_flow() {
        let prob = zero_forcing_problem(10.0, 16).unwrap();
        let states = direct_solve(&prob, 64, &[0.0, 0.33, 1.0]).unwrap();
        for (&t, got) in [0.0, 0.33, 1.0].iter().zip(states.iter()) {
            let want = prob.flow(t);
            let err = prob.y_norm(&(got - &want));
            assert!(err < 1e-11, "free-flow deviation {err} at t={t}");
        }
    }

    #[test]
    fn record_at_time_zero_returns_initial_data() {
        let prob = heat_problem(10.0, 16).unwrap();
        let states = direct_solve(&prob, 64, &[0.0]).unwrap();
        assert_eq!(states.len(), 1);
        let err = prob.y_norm(&(&states[0] - prob.u0()));
        assert!(err < 1e-15);
    }

    #[test]
    fn heat_self_convergence_shows_order_two()
    {
        let omega = 10.0;
        let prob = heat_problem(omega, 16).unwrap();
        let errors: Vec<f64> = [64usize, 128, 256]
            .iter()
            .map(|&spp| {
                let got = direct_solve(&prob, spp, &[1.0]).unwrap();
                prob.y_norm(&(&got[0] - &exact_heat_state(prob.grid(), 1.0, omega)))
            })
            .collect();
        for pair in errors.windows(2) {
            let order = (pair[0] / pair[1]).log2();
            assert!(
                (order - 2.0).abs() <= 0.2,
                "observed order {order} outside 2 ± 0.2 (errors {errors:?})"
            );
        }
    }

    #[test]
    fn transport_matches_characteristics_solution() {
        let omega = 20.0;
        let c = 1.0;
        let prob = transport_problem(omega, c, TRANSPORT_DEFAULT_POINTS).unwrap();
        let got = direct_solve(&prob, 4096, &[1.0]).unwrap();
        let want = exact_transport_states(
            prob.grid().points(),
            &[1.0],
            omega,
            c,
            &QuadratureSpec::default(),
        )
        .unwrap();
        let diff = &got[0] - &want[0];
        let err = prob.y_norm(&diff) / prob.y_norm(&want[0]);
        assert!(err < 1e-6, "relative deviation {err}");
    }
}
