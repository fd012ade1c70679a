//! Solves with truncated sources `T_n(f)` along a schedule of levels and
//! the cross-sequence compactness diagnostics.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::cells::integrate_field;
use crate::analysis::norms::{lebesgue_norm, w11_seminorm, lebesgue_integral};
use crate::error::{Error, Result};
use crate::radial::mesh::{NodalField, RadialMesh};
use crate::radial::problem::ProblemSpec;
use crate::radial::quadrature::GAUSS5;
use crate::radial::solver::{picard_solve_truncated, SolveConfig, SolveResult};
use crate::radial::sphere_area;

/// Number of levels `2^0, ..., 2^10` in the default schedule.
pub const DEFAULT_SCHEDULE_LEVELS: usize = 11;

pub fn default_schedule() -> Vec<f64> {
    (0..DEFAULT_SCHEDULE_LEVELS).map(|j| (1u64 << j) as f64).collect()
}

#[derive(Debug, Clone)]
pub struct SequenceResult {
    pub levels: Vec<f64>,
    pub members: Vec<SolveResult>,
    pub w11_norms: Vec<f64>,
    pub critical_norms: Vec<f64>,
    /// `||u_{j+1} - u_j||_{W^{1,1}}`.
    pub w11_differences: Vec<f64>,
    /// `||g_{j+1} - g_j||_{L^2}` with `g = u' (1+|u|)^-s`.
    pub flux_differences: Vec<f64>,
    /// The exponent `s` of the flux variable.
    pub flux_exponent: f64,
    pub all_converged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SequenceRow {
    pub n: f64,
    pub iterations: usize,
    pub converged: bool,
    pub w11_norm: f64,
    pub critical_norm: f64,
    pub w11_difference: Option<f64>,
    pub flux_difference: Option<f64>,
}

impl SequenceResult {
    /// One row per level; differences attach to the upper member of each pair.
    pub fn rows(&self) -> Vec<SequenceRow> {
        (0..self.levels.len())
            .map(|j| SequenceRow {
                n: self.levels[j],
                iterations: self.members[j].iterations,
                converged: self.members[j].converged(),
                w11_norm: self.w11_norms[j],
                critical_norm: self.critical_norms[j],
                w11_difference: j.checked_sub(1).map(|i| self.w11_differences[i]),
                flux_difference: j.checked_sub(1).map(|i| self.flux_differences[i]),
            })
            .collect()
    }
}

/// Flux-variable exponent: `(theta+1)/2` up to the point `theta = 1/(N-1)`,
/// `N/(2(N-1))` above it (the two agree at the point).
pub fn flux_exponent(dim: u32, theta: f64) -> f64 {
    let n = dim as f64;
    if theta <= 1.0 / (n - 1.0) + 1e-12 {
        0.5 * (theta + 1.0)
    } else {
        n / (2.0 * (n - 1.0))
    }
}

fn validate_schedule(schedule: &[f64]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::Config("truncation schedule is empty".into()));
    }
    if schedule.iter().any(|n| !(*n > 0.0 && n.is_finite())) || schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("truncation levels must be positive and strictly increasing".into()));
    }
    Ok(())
}

/// Picard solves of the truncated problems, in schedule order.
pub fn truncated_sequence(
    spec: &ProblemSpec,
    mesh: &Arc<RadialMesh>,
    config: &SolveConfig,
    schedule: &[f64],
) -> Result<SequenceResult> {
    validate_schedule(schedule)?;
    config.validate()?;
    let members = schedule
        .par_iter()
        .map(|&n| picard_solve_truncated(spec, mesh, config, n))
        .collect::<Result<Vec<_>>>()?;
    let dim = spec.dim;
    let n = dim as f64;
    let s = flux_exponent(dim, spec.theta);
    let w11_norms = members.iter().map(|m| lebesgue_integral(&m.u, 1.0, dim) + w11_seminorm(&m.u, dim)).collect();
    let critical_norms = members
        .iter()
        .map(|m| lebesgue_norm(&m.u, n / (n - 1.0), dim))
        .collect::<Result<Vec<_>>>()?;
    let mut w11_differences = Vec::new();
    let mut flux_differences = Vec::new();
    for pair in members.windows(2) {
        let diff = pair[1].u.sub(&pair[0].u)?;
        w11_differences.push(lebesgue_integral(&diff, 1.0, dim) + w11_seminorm(&diff, dim));
        flux_differences.push(flux_distance(&pair[0].u, &pair[1].u, dim, s));
    }
    let all_converged = members.iter().all(|m| m.converged());
    Ok(SequenceResult {
        levels: schedule.to_vec(),
        members,
        w11_norms,
        critical_norms,
        w11_differences,
        flux_differences,
        flux_exponent: s,
        all_converged,
    })
}

/// `||u' (1+|u|)^-s - v' (1+|v|)^-s||_{L^2}` for fields on one mesh.
pub fn flux_distance(u: &NodalField, v: &NodalField, dim: u32, s: f64) -> f64 {
    let mesh = u.mesh();
    let e = dim as i32 - 1;
    let mut total = 0.0;
    for i in 0..mesh.cells() {
        let (a, b) = mesh.cell(i);
        let (du, dv) = (u.slope(i), v.slope(i));
        total += GAUSS5.integrate(a, b, |r, t| {
            let g = du * (1.0 + u.at_local(i, t).abs()).powf(-s) - dv * (1.0 + v.at_local(i, t).abs()).powf(-s);
            g * g * r.powi(e)
        });
    }
    (sphere_area(dim) * total).sqrt()
}

/// `||u' (1+|u|)^-s||_{L^2}^2`.
pub fn flux_energy(u: &NodalField, dim: u32, s: f64) -> f64 {
    integrate_field(u, dim, |_, v, dv| dv * dv * (1.0 + v.abs()).powf(-2.0 * s))
}
