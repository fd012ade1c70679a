//! Solution CSV and solve report JSON.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::format::fmt_real;
use crate::radial::mesh::MeshSummary;
use crate::radial::problem::ProblemSpec;
use crate::radial::solver::{Method, SolveResult, SolveStatus};

/// Nodal flux `a(r) w'(r)`, the radial component of
/// `a grad u / (1+|u|)^theta`; interior nodes average the adjacent cells.
pub fn nodal_flux(spec: &ProblemSpec, result: &SolveResult) -> Vec<f64> {
    let w = &result.w;
    let mesh = w.mesh();
    let m = mesh.cells();
    mesh.nodes()
        .iter()
        .enumerate()
        .map(|(j, &r)| {
            let slope = match j {
                0 => w.slope(0),
                j if j == m => w.slope(m - 1),
                j => 0.5 * (w.slope(j - 1) + w.slope(j)),
            };
            spec.coefficient.eval(r) * slope
        })
        .collect()
}

/// CSV `r,u,w,flux`, one row per node.
pub fn write_solution_csv<W: Write + ?Sized>(out: &mut W, spec: &ProblemSpec, result: &SolveResult) -> Result<()> {
    writeln!(out, "r,u,w,flux")?;
    let flux = nodal_flux(spec, result);
    let nodes = result.u.mesh().nodes();
    for j in 0..nodes.len() {
        writeln!(
            out,
            "{},{},{},{}",
            fmt_real(nodes[j]),
            fmt_real(result.u.values()[j]),
            fmt_real(result.w.values()[j]),
            fmt_real(flux[j])
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport<'a> {
    pub spec: &'a ProblemSpec,
    pub mesh: MeshSummary,
    pub method: Method,
    pub status: SolveStatus,
    pub truncation: Option<f64>,
    pub iterations: usize,
    pub final_update: f64,
    pub residual_norm: f64,
    pub norms: &'a BTreeMap<String, f64>,
}

impl<'a> SolveReport<'a> {
    pub fn new(spec: &'a ProblemSpec, result: &'a SolveResult) -> Self {
        Self {
            spec,
            mesh: result.u.mesh().summary(),
            method: result.method,
            status: result.status,
            truncation: result.truncation,
            iterations: result.iterations,
            final_update: result.final_update,
            residual_norm: result.residual_norm,
            norms: &result.norms,
        }
    }
}

pub fn write_report_json<W: Write + ?Sized>(out: &mut W, spec: &ProblemSpec, result: &SolveResult) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, &SolveReport::new(spec, result))?;
    writeln!(out)?;
    Ok(())
}
