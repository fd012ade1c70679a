//! Radial finite element discretization of the degenerate problem on a
//! ball or an annulus in `R^N`.

pub mod export;
pub mod mesh;
pub mod problem;
pub mod quadrature;
pub mod sequence;
pub mod solver;
pub mod tridiag;

pub use mesh::{build_mesh, MeshSummary, NodalField, RadialMesh, DEFAULT_GRADING};
pub use problem::{Coefficient, DomainMode, ProblemSpec, Source, SourceTerm};
pub use sequence::{truncated_sequence, SequenceResult, DEFAULT_SCHEDULE_LEVELS};
pub use solver::{
    oracle_solve, oracle_solve_truncated, picard_solve, picard_solve_truncated, solve_linear_w, Method,
    SolveConfig, SolveResult, SolveStatus,
};

/// Surface area `2 pi^(N/2) / Gamma(N/2)` of the unit sphere in `R^N`.
pub fn sphere_area(dim: u32) -> f64 {
    let pi = std::f64::consts::PI;
    // Gamma(N/2) by recursion from Gamma(1) or Gamma(1/2)
    let (mut gamma, mut x) = if dim.is_multiple_of(2) { (1.0, 1.0) } else { (pi.sqrt(), 0.5) };
    let half = dim as f64 / 2.0;
    while x < half {
        gamma *= x;
        x += 1.0;
    }
    2.0 * pi.powf(half) / gamma
}

/// Volume of the ball of radius `r` in `R^N`.
pub fn ball_volume(dim: u32, r: f64) -> f64 {
    sphere_area(dim) * r.powi(dim as i32) / dim as f64
}
