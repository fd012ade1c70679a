//! Write the N = 3 phase diagram as CSV on standard output.
//!
//! `cargo run --example phase_diagram > phase.csv`

use std::collections::BTreeMap;
use std::io::stdout;

use degenlab::regimes::{phase_diagram_grid, write_phase_csv};

fn main() -> degenlab::Result<()> {
    let cells = phase_diagram_grid(3, 60, 1i64, 3i64, 60)?;
    write_phase_csv(stdout().lock(), &cells)?;

    let mut counts = BTreeMap::new();
    for c in &cells {
        *counts.entry(c.region.label()).or_insert(0usize) += 1;
    }
    eprintln!("{} cells: {counts:?}", cells.len());
    Ok(())
}
