//! Frequency sweep on the heat example: truncation errors versus the
//! forcing frequency for orders n = 0..3, with fitted decay exponents.
//!
//! The damped heat problem starts from the lowest Dirichlet sine mode, so
//! the exact solution is known in closed form and every measured error is
//! pure truncation error.  Expected output: the order-n error decays like
//! omega^{-(n+1)}, i.e. fitted slopes near -1, -2, -3, -4.
//!
//! Run with: cargo run --release --example heat_order_study

use oscillade::study::{fit_order, run_study_in_memory, ExampleKind, StudyConfig};

fn main() -> oscillade::Result<()> {
    let config = StudyConfig {
        example: ExampleKind::Heat,
        omegas: vec![10.0, 31.6, 100.0, 316.0, 1000.0],
        n_max: 3,
        grid_m: Some(64),
        time_samples: 201,
        ..StudyConfig::default()
    };
    println!(
        "heat order study: {} modes, {} sample times on [0, 1]\n",
        config.grid_points(),
        config.time_samples
    );

    let report = run_study_in_memory(&config, 1)?;

    print!("{:>10}", "omega");
    for n in 0..=config.n_max {
        print!("  {:>12}", format!("error n={n}"));
    }
    println!();
    for &omega in &config.omegas {
        print!("{omega:>10}");
        for n in 0..=config.n_max {
            print!("  {:>12.4e}", report.error_at(omega, n).expect("row"));
        }
        println!();
    }

    println!();
    for n in 0..=config.n_max {
        let slope = fit_order(&report, n)?;
        println!(
            "order n={n}: fitted decay exponent {slope:+.3}   (prediction {:+})",
            -(n as i64 + 1)
        );
    }
    Ok(())
}
