//! Solve the problems with truncated data T_n(f), n = 1, 2, ..., 1024,
//! on the curve study (N = 3, theta = 3/4, f = r^-2.4).

use std::sync::Arc;

use degenlab::radial::sequence::default_schedule;
use degenlab::radial::{build_mesh, truncated_sequence, Coefficient, ProblemSpec, SolveConfig, Source};

fn main() -> degenlab::Result<()> {
    let spec = ProblemSpec::new(3, 0.75, Coefficient::constant(1.0), Source::power_law(2.4, 1.0));
    let mesh = Arc::new(build_mesh(&spec, 1024, 3.0)?);
    let seq = truncated_sequence(&spec, &mesh, &SolveConfig::default(), &default_schedule())?;
    println!("{:>6} {:>5} {:>12} {:>12} {:>12}", "n", "iter", "W11", "L^{3/2}", "W11 diff");
    for row in seq.rows() {
        let diff = row.w11_difference.map_or(String::new(), |d| format!("{d:.5}"));
        println!("{:>6} {:>5} {:>12.5} {:>12.5} {:>12}", row.n, row.iterations, row.w11_norm, row.critical_norm, diff);
    }
    println!("flux exponent {:.4}, all converged: {}", seq.flux_exponent, seq.all_converged);
    Ok(())
}
