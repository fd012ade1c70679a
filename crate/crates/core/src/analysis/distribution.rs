//! Distribution functions and weak Lebesgue (Marcinkiewicz) quasinorms.

use crate::analysis::cells::measure_where;
use crate::error::{Error, Result};
use crate::radial::mesh::NodalField;

/// `(t, meas{|u| > t})` for each `t` of the grid, with level sets resolved
/// cell by cell through linear interpolation.
pub fn distribution_function(field: &NodalField, t_grid: &[f64], dim: u32) -> Result<Vec<(f64, f64)>> {
    if t_grid.is_empty() {
        return Err(Error::Input("distribution function needs a nonempty level grid".into()));
    }
    Ok(t_grid
        .iter()
        .map(|&t| (t, measure_where(field, dim, &[t, -t], |v| v.abs() > t)))
        .collect())
}

/// `sup_t t * meas{|u| > t}^(1/p)` over the grid: a lower estimate of the
/// `M^p` quasinorm.
pub fn marcinkiewicz_quasinorm(field: &NodalField, p: f64, t_grid: &[f64], dim: u32) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::Domain(format!("weak Lebesgue exponent must be positive, got {p}")));
    }
    let dist = distribution_function(field, t_grid, dim)?;
    Ok(dist.iter().map(|(t, m)| t.abs() * m.powf(1.0 / p)).fold(0.0, f64::max))
}
