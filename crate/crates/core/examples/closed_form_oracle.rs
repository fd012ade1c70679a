//! The annulus problem with f = r^-gamma has the closed form
//! u = r^-2 - 1 for N = 3, theta = 3/4, gamma = 5/2. Solve it with the
//! transformed linear solver and watch the nodal error under refinement.

use std::sync::Arc;

use degenlab::radial::{build_mesh, oracle_solve, Coefficient, ProblemSpec, Source};

fn main() -> degenlab::Result<()> {
    let spec = ProblemSpec::new(3, 0.75, Coefficient::constant(1.0), Source::power_law(2.5, 1.0)).with_exact_annulus(0.1)?;
    let mut prev: Option<f64> = None;
    for cells in [32, 64, 128, 256, 512] {
        let mesh = Arc::new(build_mesh(&spec, cells, 1.0)?);
        let result = oracle_solve(&spec, &mesh)?;
        let err = mesh
            .nodes()
            .iter()
            .zip(result.u.values())
            .map(|(&r, &u)| (u - (r.powi(-2) - 1.0)).abs())
            .fold(0.0, f64::max);
        let order = prev.map(|p| (p / err).log2());
        println!("M={cells:<4} max nodal error {err:.3e}  order {}", order.map_or("-".into(), |o| format!("{o:.2}")));
        prev = Some(err);
    }
    Ok(())
}
