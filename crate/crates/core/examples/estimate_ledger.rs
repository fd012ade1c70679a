//! Check every a priori estimate along a truncation sequence and print the
//! ledger as CSV.

use std::io::stdout;
use std::sync::Arc;

use degenlab::analysis::{check_estimates, write_ledger_csv, EstimateId, EstimateInput, EstimateParams};
use degenlab::radial::{build_mesh, truncated_sequence, Coefficient, ProblemSpec, SolveConfig, Source};

fn main() -> degenlab::Result<()> {
    let spec = ProblemSpec::new(3, 0.75, Coefficient::constant(1.0), Source::power_law(2.4, 1.0));
    let mesh = Arc::new(build_mesh(&spec, 1024, 3.0)?);
    let schedule: Vec<f64> = (0..=8).map(|j| f64::from(1 << j)).collect();
    let seq = truncated_sequence(&spec, &mesh, &SolveConfig::default(), &schedule)?;

    let rows = check_estimates(
        &EstimateId::ALL,
        EstimateInput { spec: &spec, members: &seq.members },
        &EstimateParams { samples: 20_000, ..Default::default() },
    )?;
    write_ledger_csv(&mut stdout().lock(), &rows)?;

    for id in EstimateId::ALL {
        let mine: Vec<_> = rows.iter().filter(|r| r.id == id).collect();
        let passed = mine.iter().filter(|r| r.passed()).count();
        eprintln!("{:<8} {passed}/{} passed", id.label(), mine.len());
    }
    Ok(())
}
