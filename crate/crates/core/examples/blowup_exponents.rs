//! Fit the blow-up rate of u at the origin and locate the exponent q* at
//! which the gradient stops being q-integrable.

use std::sync::Arc;

use degenlab::analysis::exponents::{fit_decay_slope, gradient_integrability_threshold, predicted_decay_slope};
use degenlab::radial::{build_mesh, oracle_solve, Coefficient, ProblemSpec, Source};

fn main() -> degenlab::Result<()> {
    for (theta, gamma) in [(0.75, 2.4), (0.5, 2.9), (0.75, 1.0)] {
        let spec = ProblemSpec::new(3, theta, Coefficient::constant(1.0), Source::power_law(gamma, 1.0));
        let mesh = Arc::new(build_mesh(&spec, 4096, 3.0)?);
        let u = oracle_solve(&spec, &mesh)?.u;
        let fit = fit_decay_slope(&u, (1e-6, 1e-3))?;
        println!(
            "theta={theta} gamma={gamma}: slope {:.4} (predicted {:?})",
            fit.fitted_slope,
            predicted_decay_slope(&spec)
        );
        let est = gradient_integrability_threshold(&spec, (1.0, 2.0), &[256, 512, 1024, 2048, 4096])?;
        println!("  q* = {:?} in {:?}, predicted {:?}, no blow-up: {}", est.q_star, est.interval, est.predicted, est.no_blow_up);
    }
    Ok(())
}
