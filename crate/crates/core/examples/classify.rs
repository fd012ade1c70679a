//! Classify a few points of the (theta, m) plane in dimension 3.
//!
//! `cargo run --example classify`

use degenlab::regimes::{classify, critical_m_values, ClassPoint, Param};

fn main() -> degenlab::Result<()> {
    let points = [("0.75", "1.2"), ("0.75", "1.3"), ("0.75", "2"), ("0.5", "1"), ("0.2", "1.1"), ("1", "1.5")];
    for (theta, m) in points {
        let theta: Param = theta.parse()?;
        let m: Param = m.parse()?;
        let report = classify(&ClassPoint::new(3, theta.clone(), m.clone(), false))?;
        let spaces: Vec<&str> = report.solution_space.iter().map(|s| s.label.as_str()).collect();
        println!("theta={:<5} m={:<5} -> {:<10} {}", theta.to_f64(), m.to_f64(), report.region.to_string(), spaces.join(", "));
    }

    // m = 1 lies on the point only when f is in L log L
    let report = classify(&ClassPoint::new(3, 0.5, 1i64, true))?;
    println!("theta=0.5   m=1, f in LlogL -> {}", report.region);

    let c = critical_m_values(3, 0.75)?;
    println!("critical values at theta=0.75: {:.6} {:.6} {:.6}", c.m_lower, c.m_upper, c.m_linfty);
    Ok(())
}
