//! Test the discrete solution against smooth bumps: the weak form
//! residual sup_phi |int a u'/(1+|u|)^theta phi' - int f phi| / ||phi||.

use std::sync::Arc;

use degenlab::analysis::residuals::{default_bumps, solution_distributional_residual};
use degenlab::radial::{build_mesh, oracle_solve, Coefficient, ProblemSpec, Source};

fn main() -> degenlab::Result<()> {
    let spec = ProblemSpec::new(3, 0.75, Coefficient::constant(1.0), Source::power_law(2.4, 1.0));
    let bumps = default_bumps(spec.outer_radius);
    for cells in [128, 512, 2048] {
        let mesh = Arc::new(build_mesh(&spec, cells, 3.0)?);
        let result = oracle_solve(&spec, &mesh)?;
        let res = solution_distributional_residual(&result, &spec, &bumps)?;
        println!("M={cells:<5} residual {res:.3e}");
    }
    Ok(())
}
