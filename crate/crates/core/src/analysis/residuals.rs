//! Weak-formulation residuals: the distributional identity against smooth
//! radial bumps and the entropy inequality against truncations.

use serde::{Deserialize, Serialize};

use crate::analysis::cells::{affine_source_integral, cut_points};
use crate::error::{domain, Error, Result};
use crate::radial::mesh::NodalField;
use crate::radial::problem::{ProblemSpec, SourceTerm};
use crate::radial::quadrature::GAUSS5;
use crate::radial::solver::SolveResult;
use crate::radial::sphere_area;
use crate::transform::{clamp_sym, psi_derivative};

/// A radial function with a derivative, evaluated pointwise.
pub trait RadialProfile {
    fn value(&self, r: f64) -> f64;
    fn derivative(&self, r: f64) -> f64;
    /// Points in `(a, b)` where the profile is not smooth, or where the
    /// quadrature should split.
    fn breakpoints(&self, a: f64, b: f64) -> Vec<f64>;
}

impl RadialProfile for NodalField {
    fn value(&self, r: f64) -> f64 {
        self.eval(r)
    }

    fn derivative(&self, r: f64) -> f64 {
        self.slope(self.mesh().locate(r))
    }

    fn breakpoints(&self, a: f64, b: f64) -> Vec<f64> {
        self.mesh().nodes().iter().copied().filter(|r| *r > a && *r < b).collect()
    }
}

/// The exact solution of a closed-form problem.
pub struct ClosedFormProfile<'a> {
    spec: &'a ProblemSpec,
}

impl<'a> ClosedFormProfile<'a> {
    pub fn new(spec: &'a ProblemSpec) -> Result<Self> {
        if spec.exact_w(spec.outer_radius).is_none() {
            return Err(Error::InvalidSpec("no closed-form solution for this coefficient and source".into()));
        }
        Ok(Self { spec })
    }
}

impl RadialProfile for ClosedFormProfile<'_> {
    fn value(&self, r: f64) -> f64 {
        self.spec.exact_u(r).unwrap_or(f64::NAN)
    }

    fn derivative(&self, r: f64) -> f64 {
        // u' = w' (1+|u|)^theta
        let u = self.value(r);
        self.spec.exact_w_derivative(r).unwrap_or(f64::NAN) / psi_derivative(self.spec.theta, u)
    }

    fn breakpoints(&self, a: f64, b: f64) -> Vec<f64> {
        (1..256).map(|i| a + (b - a) * i as f64 / 256.0).collect()
    }
}

/// `C (r-a)^2 (b-r)^2` scaled to unit maximum, supported in `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub a: f64,
    pub b: f64,
}

impl Bump {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(0.0 <= a && a < b && b.is_finite()) {
            return Err(Error::Input(format!("invalid bump support ({a}, {b})")));
        }
        Ok(Self { a, b })
    }

    fn scale(&self) -> f64 {
        16.0 / (self.b - self.a).powi(4)
    }

    pub fn value(&self, r: f64) -> f64 {
        if r <= self.a || r >= self.b {
            return 0.0;
        }
        self.scale() * (r - self.a).powi(2) * (self.b - r).powi(2)
    }

    pub fn derivative(&self, r: f64) -> f64 {
        if r <= self.a || r >= self.b {
            return 0.0;
        }
        let (p, q) = (r - self.a, self.b - r);
        2.0 * self.scale() * p * q * (q - p)
    }

    /// `sup |phi| + sup |phi'|`.
    pub fn w1_infinity_size(&self) -> f64 {
        1.0 + 16.0 / (3.0 * 3f64.sqrt() * (self.b - self.a))
    }
}

/// The five default test bumps, supports scaled to the outer radius.
pub fn default_bumps(outer: f64) -> Vec<Bump> {
    [(0.2, 0.8), (0.1, 0.4), (0.3, 0.6), (0.5, 0.9), (0.15, 0.95)]
        .iter()
        .map(|&(a, b)| Bump { a: a * outer, b: b * outer })
        .collect()
}

/// `max_phi |omega int a u' (1+|u|)^-theta phi' r^(N-1) - omega int f phi r^(N-1)|`
/// over the bumps, each term divided by the bump's `W^{1,inf}` size.
pub fn distributional_residual(
    profile: &dyn RadialProfile,
    spec: &ProblemSpec,
    source: SourceTerm<'_>,
    tests: &[Bump],
) -> Result<f64> {
    let e = spec.dim as i32 - 1;
    let omega = sphere_area(spec.dim);
    let mut worst = 0.0f64;
    for bump in tests {
        if bump.a < spec.r_min() || bump.b > spec.outer_radius {
            return Err(Error::Input(format!(
                "test function support ({}, {}) leaves the domain [{}, {}]",
                bump.a,
                bump.b,
                spec.r_min(),
                spec.outer_radius
            )));
        }
        let mut pts = vec![bump.a];
        pts.extend(profile.breakpoints(bump.a, bump.b));
        pts.push(bump.b);
        let mut total = 0.0;
        for w in pts.windows(2) {
            total += GAUSS5.integrate(w[0], w[1], |r, _| {
                let u = profile.value(r);
                let flux = spec.coefficient.eval(r) * profile.derivative(r) * psi_derivative(spec.theta, u);
                (flux * bump.derivative(r) - source.eval(r) * bump.value(r)) * r.powi(e)
            });
        }
        worst = worst.max((omega * total).abs() / bump.w1_infinity_size());
    }
    Ok(worst)
}

/// [`distributional_residual`] of a solve result against the source it
/// was computed with.
pub fn solution_distributional_residual(result: &SolveResult, spec: &ProblemSpec, tests: &[Bump]) -> Result<f64> {
    let term = SourceTerm { source: &spec.source, level: result.truncation };
    distributional_residual(&result.u, spec, term, tests)
}

/// `lhs - rhs` of the entropy inequality
/// `int a u' (1+|u|)^-theta (T_k(u - phi))' <= int f T_k(u - phi)`
/// on the discrete fields (`phi` is interpolated onto the solution mesh).
pub fn entropy_residual(result: &SolveResult, spec: &ProblemSpec, phi: &NodalField, k: f64) -> Result<f64> {
    if !(k > 0.0) {
        return domain(format!("truncation level must be positive, got {k}"));
    }
    let u = &result.u;
    let mesh = u.mesh();
    let uv = u.values();
    let d: Vec<f64> = mesh.nodes().iter().zip(uv).map(|(&r, &x)| x - phi.eval(r)).collect();
    if d.iter().any(|x| !x.is_finite()) {
        return Err(Error::Input("test field must be finite".into()));
    }
    let term = SourceTerm { source: &spec.source, level: result.truncation };
    let e = spec.dim as i32 - 1;
    let (mut lhs, mut rhs) = (0.0, 0.0);
    for i in 0..mesh.cells() {
        let (a, b) = mesh.cell(i);
        let h = b - a;
        let du = u.slope(i);
        let dd = (d[i + 1] - d[i]) / h;
        let ts = cut_points(d[i], d[i + 1], &[k, -k]);
        for w in ts.windows(2) {
            let (lo, hi) = (a + h * w[0], a + h * w[1]);
            if hi <= lo {
                continue;
            }
            let dmid = d[i] + (d[i + 1] - d[i]) * 0.5 * (w[0] + w[1]);
            if dmid.abs() < k {
                lhs += GAUSS5.integrate(lo, hi, |r, _| {
                    let uu = uv[i] + du * (r - a);
                    spec.coefficient.eval(r) * du * psi_derivative(spec.theta, uu) * dd * r.powi(e)
                });
                // T_k(d) = d[i] + dd (r - a) on this piece
                rhs += affine_source_integral(spec.dim, term, lo, hi, d[i] - dd * a, dd);
            } else {
                rhs += affine_source_integral(spec.dim, term, lo, hi, clamp_sym(k, dmid), 0.0);
            }
        }
    }
    let omega = sphere_area(spec.dim);
    Ok(omega * (lhs - rhs))
}
