//! Compare the frozen-coefficient Picard iteration with the exact
//! transformed solve on a singular ball problem.

use std::sync::Arc;

use degenlab::radial::{build_mesh, oracle_solve, picard_solve, Coefficient, ProblemSpec, SolveConfig, Source};

fn main() -> degenlab::Result<()> {
    let spec = ProblemSpec::new(3, 0.75, Coefficient::constant(1.0), Source::power_law(1.5, 1.0));
    let mesh = Arc::new(build_mesh(&spec, 512, 3.0)?);
    let oracle = oracle_solve(&spec, &mesh)?;
    let picard = picard_solve(&spec, &mesh, &SolveConfig::default())?;

    let diff = oracle.u.values().iter().zip(picard.u.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("picard: {:?} after {} iterations, last update {:.2e}", picard.status, picard.iterations, picard.final_update);
    println!("max |u_picard - u_oracle| = {diff:.3e}, u(0) = {:.6}", oracle.u.values()[0]);
    for (k, v) in &picard.norms {
        println!("  {k:<26} {v:.6}");
    }
    Ok(())
}
