//! Graded radial grids and nodal fields on them.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::radial::problem::ProblemSpec;

/// Strictly increasing radii `r_0 < ... < r_M`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialMesh {
    nodes: Vec<f64>,
    grading: f64,
    ball: bool,
}

/// Compact description of a mesh for reports.
#[derive(Debug, Clone, Serialize)]
pub struct MeshSummary {
    pub cells: usize,
    pub grading: f64,
    pub r_min: f64,
    pub outer_radius: f64,
    pub mode: &'static str,
    pub min_width: f64,
    pub max_width: f64,
}

/// Default grading exponent; clusters nodes towards the centre.
pub const DEFAULT_GRADING: f64 = 3.0;

/// `r_i = r_min + (outer - r_min) (i/M)^grading` for the domain of `spec`.
pub fn build_mesh(spec: &ProblemSpec, cells: usize, grading: f64) -> Result<RadialMesh> {
    if cells < 8 {
        return Err(Error::Config(format!("mesh needs at least 8 cells, got {cells}")));
    }
    RadialMesh::graded(spec.r_min(), spec.outer_radius, cells, grading, spec.is_ball())
}

impl RadialMesh {
    /// Power-graded mesh without the minimum cell count of [`build_mesh`].
    pub fn graded(r_min: f64, outer: f64, cells: usize, grading: f64, ball: bool) -> Result<Self> {
        if cells == 0 {
            return Err(Error::Config("mesh needs at least one cell".into()));
        }
        if !(grading >= 1.0 && grading.is_finite()) {
            return Err(Error::Config(format!("grading must be at least 1, got {grading}")));
        }
        if !(r_min >= 0.0 && r_min < outer) {
            return Err(Error::Config(format!("invalid radial interval [{r_min}, {outer}]")));
        }
        if ball && r_min != 0.0 {
            return Err(Error::Config("ball meshes start at the origin".into()));
        }
        let len = outer - r_min;
        let mut nodes: Vec<f64> = (0..=cells)
            .map(|i| r_min + len * (i as f64 / cells as f64).powf(grading))
            .collect();
        nodes[cells] = outer;
        if nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Config("grading too strong: coincident nodes".into()));
        }
        Ok(Self { nodes, grading, ball })
    }

    /// Mesh through explicit nodes.
    pub fn from_nodes(nodes: Vec<f64>, ball: bool) -> Result<Self> {
        if nodes.len() < 2 || nodes.windows(2).any(|w| !(w[0] < w[1])) || nodes[0] < 0.0 {
            return Err(Error::Config("mesh nodes must be nonnegative and strictly increasing".into()));
        }
        if ball && nodes[0] != 0.0 {
            return Err(Error::Config("ball meshes start at the origin".into()));
        }
        Ok(Self { nodes, grading: f64::NAN, ball })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn cells(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn cell(&self, i: usize) -> (f64, f64) {
        (self.nodes[i], self.nodes[i + 1])
    }

    pub fn grading(&self) -> f64 {
        self.grading
    }

    pub fn is_ball(&self) -> bool {
        self.ball
    }

    pub fn r_min(&self) -> f64 {
        self.nodes[0]
    }

    pub fn outer(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn max_width(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    pub fn summary(&self) -> MeshSummary {
        MeshSummary {
            cells: self.cells(),
            grading: self.grading,
            r_min: self.r_min(),
            outer_radius: self.outer(),
            mode: if self.ball { "ball" } else { "annulus" },
            min_width: self.nodes.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min),
            max_width: self.max_width(),
        }
    }

    /// Index of the cell containing `r` (clamped to the mesh).
    pub fn locate(&self, r: f64) -> usize {
        let i = self.nodes.partition_point(|x| *x <= r);
        i.saturating_sub(1).min(self.cells() - 1)
    }
}

/// Nodal values of a continuous piecewise linear function.
#[derive(Debug, Clone)]
pub struct NodalField {
    mesh: Arc<RadialMesh>,
    values: Vec<f64>,
}

impl NodalField {
    pub fn new(mesh: Arc<RadialMesh>, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.len() {
            return Err(Error::Input(format!(
                "field has {} values for {} nodes",
                values.len(),
                mesh.len()
            )));
        }
        Ok(Self { mesh, values })
    }

    /// Nodal interpolant of `f`.
    pub fn from_fn(mesh: Arc<RadialMesh>, f: impl Fn(f64) -> f64) -> Self {
        let values = mesh.nodes().iter().map(|&r| f(r)).collect();
        Self { mesh, values }
    }

    pub fn zeros(mesh: Arc<RadialMesh>) -> Self {
        let n = mesh.len();
        Self { mesh, values: vec![0.0; n] }
    }

    pub fn mesh(&self) -> &RadialMesh {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<RadialMesh> {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Constant derivative on cell `i`.
    #[inline]
    pub fn slope(&self, i: usize) -> f64 {
        let (a, b) = self.mesh.cell(i);
        (self.values[i + 1] - self.values[i]) / (b - a)
    }

    /// Linear interpolation at local coordinate `t in [0, 1]` of cell `i`.
    #[inline]
    pub fn at_local(&self, i: usize, t: f64) -> f64 {
        self.values[i] * (1.0 - t) + self.values[i + 1] * t
    }

    pub fn eval(&self, r: f64) -> f64 {
        let i = self.mesh.locate(r);
        let (a, b) = self.mesh.cell(i);
        self.at_local(i, ((r - a) / (b - a)).clamp(0.0, 1.0))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { mesh: self.mesh.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Pointwise difference; both fields must live on the same mesh.
    pub fn sub(&self, other: &NodalField) -> Result<Self> {
        if self.mesh.nodes() != other.mesh.nodes() {
            return Err(Error::Input("fields live on different meshes".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Self { mesh: self.mesh.clone(), values })
    }
}
