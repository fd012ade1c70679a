//! The point theta = 1/(N-1), m = 1 with f in L log L: N = 3, theta = 1/2
//! and f = r^-2.9, which is in L log L but in no L^m with m > 1.

use std::sync::Arc;

use degenlab::analysis::{check_estimates, EstimateId, EstimateInput, EstimateParams};
use degenlab::radial::{build_mesh, truncated_sequence, Coefficient, ProblemSpec, SolveConfig, Source};
use degenlab::regimes::{classify, ClassPoint};

fn main() -> degenlab::Result<()> {
    println!("region: {}", classify(&ClassPoint::new(3, 0.5, 1i64, true))?.region);

    let spec = ProblemSpec::new(3, 0.5, Coefficient::constant(1.0), Source::power_law(2.9, 1.0));
    let mesh = Arc::new(build_mesh(&spec, 2048, 3.0)?);
    let schedule: Vec<f64> = (0..=10).map(|j| f64::from(1 << j)).collect();
    let seq = truncated_sequence(&spec, &mesh, &SolveConfig::default(), &schedule)?;
    let w11: Vec<String> = seq.w11_norms.iter().map(|v| format!("{v:.3}")).collect();
    println!("W11 norms: {}", w11.join(" "));

    let ids = [EstimateId::Llogl, EstimateId::Camino0, EstimateId::Camino, EstimateId::Stima];
    let params = EstimateParams { rho: Some(0.25), ..Default::default() };
    for row in check_estimates(&ids, EstimateInput { spec: &spec, members: &seq.members }, &params)? {
        println!(
            "{:<8} k={:<5} n={:<6} lhs={:<12.5e} rhs={:<12.5e} {}",
            row.id.label(),
            row.k.map_or("-".into(), |k| k.to_string()),
            row.n.map_or("-".into(), |n| n.to_string()),
            row.lhs,
            row.rhs,
            row.verdict.label()
        );
    }
    Ok(())
}
