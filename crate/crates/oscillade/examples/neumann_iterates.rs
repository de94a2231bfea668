//! Neumann (iterated Duhamel) reference solver on the heat example:
//! factorial convergence of the fixed-point iteration.
//!
//! The exact solution satisfies u = e^{tL}u0 + K u with the oscillatory
//! Volterra operator (K v)(t) = int_0^t e^{(t-s)L} alpha e^{iws} v(s) ds.
//! Iterating from the free flow converges factorially: the j-th iterate
//! misses by at most |z|^{j+1}/(j+1)! e^{|z|} ||u0|| with
//! |z| <= 2/omega the size of the accumulated oscillatory integral.
//!
//! Run with: cargo run --release --example neumann_iterates

use oscillade::oracle::{exact_heat_state, neumann_solve, QuadratureSpec};
use oscillade::problems::heat_problem;

fn main() -> oscillade::Result<()> {
    let omega = 10.0;
    let prob = heat_problem(omega, 64)?;
    let iterations = 6;
    let iterates = neumann_solve(&prob, &QuadratureSpec::default(), iterations)?;

    let grid = prob.grid().clone();
    let residuals = iterates.successive_difference_norms(&prob);
    let z_max = 2.0 / omega;
    let u0_norm = prob.y_norm(prob.u0());
    let factorial = |m: usize| (1..=m).product::<usize>() as f64;

    println!("heat example, omega = {omega}, {iterations} Neumann iterations\n");
    println!(
        "{:>4}  {:>14}  {:>14}  {:>14}",
        "j", "error vs exact", "envelope", "residual"
    );
    for j in 1..=iterations {
        let error = iterates.max_error_vs(&prob, j, |t| exact_heat_state(&grid, t, omega));
        let envelope =
            u0_norm * z_max.powi(j as i32 + 1) / factorial(j + 1) * z_max.exp();
        println!(
            "{j:>4}  {error:>14.4e}  {envelope:>14.4e}  {:>14.4e}",
            residuals[j - 1]
        );
    }
    println!(
        "\neach iteration divides the error by roughly omega/2 times the next\n\
         integer: the factorial envelope (third column) always dominates."
    );
    Ok(())
}
