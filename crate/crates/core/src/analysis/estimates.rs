//! Checks of the a priori estimates behind the existence proofs, evaluated
//! on discrete solutions of the truncated problems.
//!
//! Inequalities with a computable right-hand side are checked as such,
//! with a discretization allowance. Estimates whose constant is not
//! explicit are checked as boundedness (every member below the
//! refinement-extrapolated value of the untruncated problem) or as tail
//! decay across the sequence.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::cells::{integrate_data_where_at_least, integrate_field, integrate_field_where};
use crate::analysis::norms::{lebesgue_integral, w11_seminorm};
use crate::error::{domain, Error, Result};
use crate::format::fmt_real;
use crate::radial::mesh::{NodalField, RadialMesh, DEFAULT_GRADING};
use crate::radial::problem::{ProblemSpec, Source};
use crate::radial::quadrature::integrate_radial;
use crate::radial::solver::{oracle_solve, SolveResult};
use crate::radial::{ball_volume, sphere_area};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum EstimateId {
    #[serde(rename = "TK1")]
    Tk1,
    #[serde(rename = "INIZIO")]
    Inizio,
    R,
    L,
    #[serde(rename = "ONE")]
    One,
    #[serde(rename = "INIZIOK")]
    Iniziok,
    #[serde(rename = "ONE_K")]
    OneK,
    #[serde(rename = "MALAGA")]
    Malaga,
    #[serde(rename = "BAR")]
    Bar,
    #[serde(rename = "CAMINO0")]
    Camino0,
    #[serde(rename = "CAMINO")]
    Camino,
    #[serde(rename = "STIMA")]
    Stima,
    #[serde(rename = "LLOGL")]
    Llogl,
}

impl EstimateId {
    pub const ALL: [EstimateId; 13] = [
        Self::Tk1,
        Self::Inizio,
        Self::R,
        Self::L,
        Self::One,
        Self::Iniziok,
        Self::OneK,
        Self::Malaga,
        Self::Bar,
        Self::Camino0,
        Self::Camino,
        Self::Stima,
        Self::Llogl,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Self::Tk1 => "TK1",
            Self::Inizio => "INIZIO",
            Self::R => "R",
            Self::L => "L",
            Self::One => "ONE",
            Self::Iniziok => "INIZIOK",
            Self::OneK => "ONE_K",
            Self::Malaga => "MALAGA",
            Self::Bar => "BAR",
            Self::Camino0 => "CAMINO0",
            Self::Camino => "CAMINO",
            Self::Stima => "STIMA",
            Self::Llogl => "LLOGL",
        }
    }

    /// Both sides computable: failures here are hard failures.
    pub fn is_explicit(self) -> bool {
        matches!(self, Self::Tk1 | Self::Inizio | Self::Malaga | Self::Bar | Self::Camino0 | Self::Camino)
    }

    /// Needs a truncation sequence rather than single solves.
    pub fn needs_sequence(self) -> bool {
        matches!(self, Self::R | Self::L | Self::One | Self::Iniziok | Self::OneK | Self::Malaga | Self::Stima)
    }
}

impl fmt::Display for EstimateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for EstimateId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        Self::ALL
            .iter()
            .copied()
            .find(|id| id.label().eq_ignore_ascii_case(t))
            .ok_or_else(|| Error::Input(format!("unknown estimate id `{t}`")))
    }
}

/// Comma-separated ids; an empty list is an input error.
pub fn parse_ids(list: &str) -> Result<Vec<EstimateId>> {
    let ids = list
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect::<Result<Vec<_>>>()?;
    if ids.is_empty() {
        return Err(Error::Input("no estimate ids given".into()));
    }
    Ok(ids)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Passed,
    Failed,
    NotApplicable,
}

impl Verdict {
    fn of(ok: bool) -> Self {
        if ok {
            Self::Passed
        } else {
            Self::Failed
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Passed => "true",
            Self::Failed => "false",
            Self::NotApplicable => "n/a",
        }
    }
}

/// One evaluated instance of an estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateCheck {
    pub id: EstimateId,
    pub k: Option<f64>,
    pub p: Option<f64>,
    pub rho: Option<f64>,
    /// Truncation level of the solve the row was evaluated on.
    pub n: Option<f64>,
    /// Radius of the set `E` (equiintegrability rows).
    pub radius: Option<f64>,
    pub lhs: f64,
    /// Explicit bound, or the extrapolated sequence bound for estimates
    /// with an unspecified constant.
    pub rhs: f64,
    pub explicit: bool,
    pub allowance: f64,
    pub verdict: Verdict,
    pub note: Option<String>,
}

impl EstimateCheck {
    fn new(id: EstimateId, lhs: f64, rhs: f64) -> Self {
        Self {
            id,
            k: None,
            p: None,
            rho: None,
            n: None,
            radius: None,
            lhs,
            rhs,
            explicit: id.is_explicit(),
            allowance: 0.0,
            verdict: Verdict::NotApplicable,
            note: None,
        }
    }

    fn not_applicable(id: EstimateId, note: &str) -> Self {
        Self { note: Some(note.to_string()), ..Self::new(id, f64::NAN, f64::NAN) }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Passed
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Failed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateParams {
    pub k_list: Vec<f64>,
    /// Summability exponent of `f`; defaults to the lower critical value.
    pub m: Option<f64>,
    /// Defaults to the midpoint `(N-2)/(2(N-1))` of the admissible range.
    pub rho: Option<f64>,
    pub seed: u64,
    pub samples: usize,
    /// Number of shrinking balls `E_j` for the equiintegrability check.
    pub malaga_levels: usize,
    /// Relative tolerance of explicit comparisons.
    pub tol: f64,
}

impl Default for EstimateParams {
    fn default() -> Self {
        Self {
            k_list: vec![1.0, 2.0, 4.0, 8.0],
            m: None,
            rho: None,
            seed: 0,
            samples: 100_000,
            malaga_levels: 8,
            tol: 1e-6,
        }
    }
}

/// Solutions the checks run on: a single solve or a truncation sequence
/// in increasing level order.
#[derive(Debug, Clone, Copy)]
pub struct EstimateInput<'a> {
    pub spec: &'a ProblemSpec,
    pub members: &'a [SolveResult],
}

struct Ctx<'a> {
    spec: &'a ProblemSpec,
    members: &'a [SolveResult],
    params: &'a EstimateParams,
    dim: u32,
    n: f64,
    omega: f64,
}

impl Ctx<'_> {
    fn f_integral(&self, h: impl Fn(f64) -> f64) -> f64 {
        let e = self.dim as i32 - 1;
        self.omega * integrate_radial(self.spec.r_min(), self.spec.outer_radius, |r| h(self.spec.source.eval(r)) * r.powi(e))
    }

    /// `||f||_m^m`, infinite when a power source is not `m`-integrable.
    fn f_power_integral(&self, m: f64) -> f64 {
        if let Source::PowerLaw { gamma, amp } = self.spec.source {
            if amp != 0.0 && self.spec.is_ball() && gamma * m >= self.n {
                return f64::INFINITY;
            }
        }
        self.f_integral(|f| f.abs().powf(m))
    }

    fn m(&self) -> f64 {
        self.params.m.unwrap_or_else(|| self.n / (self.n + 1.0 - self.spec.theta * (self.n - 1.0)))
    }

    fn rho(&self) -> Result<f64> {
        let hi = (self.n - 2.0) / (self.n - 1.0);
        let rho = self.params.rho.unwrap_or(0.5 * hi);
        if !(rho > 0.0 && rho < hi) {
            return domain(format!("rho must lie in (0, {hi}), got {rho}"));
        }
        Ok(rho)
    }

    /// Discretization allowance `(h_max / L) * lhs`.
    fn allowance(&self, u: &NodalField, lhs: f64) -> f64 {
        let mesh = u.mesh();
        mesh.max_width() / (mesh.outer() - mesh.r_min()) * lhs.abs()
    }

    fn explicit(&self, mut row: EstimateCheck, u: &NodalField) -> EstimateCheck {
        row.allowance = self.allowance(u, row.lhs);
        let ok = row.lhs.is_finite() && row.lhs <= row.rhs * (1.0 + self.params.tol) + row.allowance;
        row.verdict = Verdict::of(ok);
        row
    }

    fn ks(&self) -> Result<Vec<f64>> {
        let mut ks = self.params.k_list.clone();
        if ks.iter().any(|k| !(*k >= 0.0 && k.is_finite())) {
            return Err(Error::Input("truncation levels k must be finite and nonnegative".into()));
        }
        ks.sort_by(f64::total_cmp);
        ks.dedup();
        if ks.is_empty() {
            return Err(Error::Input("empty k list".into()));
        }
        Ok(ks)
    }
}

/// `int |grad u|^2 (1+|u|)^-s` over `{ |u| >= k }`.
fn tail_energy(u: &NodalField, dim: u32, k: f64, s: f64) -> f64 {
    integrate_field_where(u, dim, &[k, -k], |v| v.abs() >= k, |_, v, dv| dv * dv * (1.0 + v.abs()).powf(-s))
}

/// `int |grad u|` over `{ |u| >= k }`.
fn tail_gradient(u: &NodalField, dim: u32, k: f64) -> f64 {
    integrate_field_where(u, dim, &[k, -k], |v| v.abs() >= k, |_, _, dv| dv.abs())
}

/// `int |grad u|` over the ball (or inner annulus) of outer radius `rho`.
fn inner_gradient(u: &NodalField, dim: u32, rho: f64) -> f64 {
    let mesh = u.mesh();
    let n = dim as f64;
    let mut total = 0.0;
    for i in 0..mesh.cells() {
        let (a, b) = mesh.cell(i);
        if a >= rho {
            break;
        }
        total += u.slope(i).abs() * (b.min(rho).powf(n) - a.powf(n)) / n;
    }
    sphere_area(dim) * total
}

/// Boundedness verdict for a family of values along the sequence: finite,
/// and the last increments contracting. Returns the verdict and the
/// geometric extrapolation of the limit.
pub fn bounded_family(values: &[f64]) -> (bool, f64) {
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return (false, f64::INFINITY);
    }
    let last = values[values.len() - 1];
    let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let inc: Vec<f64> = values
        .windows(2)
        .map(|w| {
            let d = (w[1] - w[0]).abs();
            if d <= 1e-12 * scale {
                0.0
            } else {
                d
            }
        })
        .collect();
    if inc.len() < 2 {
        return (true, last + inc.last().copied().unwrap_or(0.0));
    }
    let start = inc.len().saturating_sub(4);
    let tail = &inc[start..];
    let mut q = 0.0f64;
    let mut ok = true;
    for w in tail.windows(2) {
        match (w[0] == 0.0, w[1] == 0.0) {
            (_, true) => {}
            (true, false) => ok = false,
            (false, false) => {
                let ratio = w[1] / w[0];
                ok &= ratio < 1.0;
                q = q.max(ratio);
            }
        }
    }
    if !ok {
        return (false, f64::INFINITY);
    }
    let d = tail[tail.len() - 1];
    (true, last + d * q / (1.0 - q))
}

fn need_members(ctx: &Ctx<'_>, id: EstimateId) -> Result<()> {
    let need = if id.needs_sequence() { 3 } else { 1 };
    if ctx.members.len() < need {
        return Err(Error::Input(format!(
            "{id} needs {} solve results, got {}",
            if need == 1 { "at least one".to_string() } else { format!("a sequence of at least {need}") },
            ctx.members.len()
        )));
    }
    Ok(())
}

/// Pointwise sides of `a log(1+b) <= (a/rho) log(1 + a/rho) + (1+b)^rho`.
pub fn bar_sides(a: f64, b: f64, rho: f64) -> (f64, f64) {
    let lhs = a * b.ln_1p();
    let x = a / rho;
    (lhs, x * x.ln_1p() + (1.0 + b).powf(rho))
}

/// Evaluates one estimate; rows are ordered by `k`, then level `n`.
pub fn check_estimate(id: EstimateId, input: EstimateInput<'_>, params: &EstimateParams) -> Result<Vec<EstimateCheck>> {
    let spec = input.spec;
    spec.validate()?;
    if !(params.tol >= 0.0) {
        return Err(Error::Config("estimate tolerance must be nonnegative".into()));
    }
    let ctx = Ctx {
        spec,
        members: input.members,
        params,
        dim: spec.dim,
        n: spec.dim as f64,
        omega: sphere_area(spec.dim),
    };
    match id {
        EstimateId::Bar => bar(&ctx),
        EstimateId::Llogl => llogl(&ctx),
        _ => {
            need_members(&ctx, id)?;
            match id {
                EstimateId::Tk1 => tk1(&ctx),
                EstimateId::Inizio => inizio(&ctx),
                EstimateId::R => {
                    let s = ctx.n / (ctx.n - 1.0);
                    boundedness(&ctx, id, None, |u| lebesgue_integral(u, s, ctx.dim))
                }
                EstimateId::L => {
                    let s = ctx.n / (ctx.n - 1.0);
                    boundedness(&ctx, id, None, |u| tail_energy(u, ctx.dim, 0.0, s))
                }
                EstimateId::One => boundedness(&ctx, id, None, |u| w11_seminorm(u, ctx.dim)),
                EstimateId::Stima => {
                    let s = (1.0 - spec.theta) * ctx.n / (ctx.n - 2.0);
                    boundedness(&ctx, id, Some(s), |u| lebesgue_integral(u, s, ctx.dim))
                }
                EstimateId::Iniziok => tail_decay(&ctx, id),
                EstimateId::OneK => tail_decay(&ctx, id),
                EstimateId::Malaga => malaga(&ctx),
                EstimateId::Camino0 => camino(&ctx, false),
                EstimateId::Camino => camino(&ctx, true),
                EstimateId::Bar | EstimateId::Llogl => unreachable!(),
            }
        }
    }
}

/// All requested estimates; evaluated concurrently, returned in id order.
pub fn check_estimates(ids: &[EstimateId], input: EstimateInput<'_>, params: &EstimateParams) -> Result<Vec<EstimateCheck>> {
    if ids.is_empty() {
        return Err(Error::Input("no estimate ids given".into()));
    }
    let parts = ids
        .par_iter()
        .map(|&id| check_estimate(id, input, params))
        .collect::<Result<Vec<_>>>()?;
    Ok(parts.into_iter().flatten().collect())
}

/// `int |grad T_k u|^2 <= k (1+k)^theta ||f||_1 / alpha`.
pub fn tk1_bound(k: f64, theta: f64, f_l1: f64, alpha: f64) -> f64 {
    k * (1.0 + k).powf(theta) * f_l1 / alpha
}

fn tk1(ctx: &Ctx<'_>) -> Result<Vec<EstimateCheck>> {
    let f_l1 = ctx.f_integral(f64::abs);
    let mut rows = Vec::new();
    for k in ctx.ks()? {
        for m in ctx.members {
            let lhs = integrate_field_where(&m.u, ctx.dim, &[k, -k], |v| v.abs() < k, |_, _, dv| dv * dv);
            let mut row = EstimateCheck::new(EstimateId::Tk1, lhs, tk1_bound(k, ctx.spec.theta, f_l1, ctx.spec.alpha));
            row.k = Some(k);
            row.n = m.truncation;
            rows.push(ctx.explicit(row, &m.u));
        }
    }
    Ok(rows)
}

fn inizio(ctx: &Ctx<'_>) -> Result<Vec<EstimateCheck>> {
    let id = EstimateId::Inizio;
    let p = ctx.spec.theta - 1.0 / (ctx.n - 1.0);
    let m = ctx.m();
    if !(p > 0.0) {
        return Ok(vec![EstimateCheck { p: Some(p), ..EstimateCheck::not_applicable(id, "needs theta > 1/(N-1)") }]);
    }
    if !(m > 1.0) {
        return Ok(vec![EstimateCheck { p: Some(p), ..EstimateCheck::not_applicable(id, "needs m > 1") }]);
    }
    let f_m = ctx.f_power_integral(m);
    if !f_m.is_finite() {
        return Ok(vec![EstimateCheck { p: Some(p), ..EstimateCheck::not_applicable(id, "f is not in L^m") }]);
    }
    let f_norm = f_m.powf(1.0 / m);
    let mp = m / (m - 1.0);
    let s = ctx.n / (ctx.n - 1.0);
    let mut rows = Vec::new();
    for member in ctx.members {
        let u = &member.u;
        let lhs = ctx.spec.alpha * p * tail_energy(u, ctx.dim, 0.0, s);
        let inner = integrate_field(u, ctx.dim, |_, v, _| ((1.0 + v.abs()).powf(p) - 1.0).powf(mp));
        let mut row = EstimateCheck::new(id, lhs, f_norm * inner.powf(1.0 / mp));
        row.p = Some(p);
        row.n = member.truncation;
        rows.push(ctx.explicit(row, u));
    }
    Ok(rows)
}

fn boundedness(ctx: &Ctx<'_>, id: EstimateId, p: Option<f64>, value: impl Fn(&NodalField) -> f64 + Sync) -> Result<Vec<EstimateCheck>> {
    let values: Vec<f64> = ctx.members.iter().map(|m| value(&m.u)).collect();
    let limit = limit_bound(ctx.spec, ctx.members[0].u.mesh(), &value)?;
    let rows: Vec<EstimateCheck> = ctx
        .members
        .iter()
        .zip(&values)
        .map(|(m, &v)| {
            let mut row = EstimateCheck::new(id, v, limit.bound);
            row.p = p;
            row.n = m.truncation;
            row.allowance = ctx.allowance(&m.u, v);
            row
        })
        .collect();
    let ok = limit.converged
        && rows.iter().all(|r| r.lhs.is_finite() && r.lhs <= r.rhs * (1.0 + ctx.params.tol) + r.allowance);
    Ok(rows.into_iter().map(|r| EstimateCheck { verdict: Verdict::of(ok), ..r }).collect())
}

/// Refinement study of a functional of the untruncated solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitBound {
    pub cells: Vec<usize>,
    pub values: Vec<f64>,
    /// Values converge geometrically under refinement.
    pub converged: bool,
    /// Extrapolated limit (infinite when not converged).
    pub bound: f64,
}

/// Mesh doublings used by [`limit_bound`].
pub const LIMIT_REFINEMENTS: usize = 5;

/// Evaluates `value` on oracle solutions of the untruncated problem on
/// `mesh` and four successive doublings of it (same grading and domain)
/// and extrapolates the limit. A functional that is finite on the
/// continuous solution converges; one that is not keeps growing.
pub fn limit_bound(spec: &ProblemSpec, mesh: &RadialMesh, value: &(dyn Fn(&NodalField) -> f64 + Sync)) -> Result<LimitBound> {
    let grading = if mesh.grading().is_finite() { mesh.grading() } else { DEFAULT_GRADING };
    let cells: Vec<usize> = (0..LIMIT_REFINEMENTS).map(|i| mesh.cells() << i).collect();
    let values = cells
        .par_iter()
        .map(|&m| {
            let fine = Arc::new(RadialMesh::graded(mesh.r_min(), mesh.outer(), m, grading, mesh.is_ball())?);
            oracle_solve(spec, &fine).map(|r| value(&r.u))
        })
        .collect::<Result<Vec<_>>>()?;
    let (converged, bound) = bounded_family(&values);
    Ok(LimitBound { cells, values, converged, bound })
}

/// Sup over the sequence strictly decreasing in `k` until it vanishes.
fn strictly_decreasing_to_zero(sups: &[f64]) -> bool {
    sups.windows(2).all(|w| w[1] < w[0] || (w[0] == 0.0 && w[1] == 0.0))
}

fn tail_decay(ctx: &Ctx<'_>, id: EstimateId) -> Result<Vec<EstimateCheck>> {
    let ks = ctx.ks()?;
    if ks.len() < 2 {
        return Err(Error::Input(format!("{id} needs at least two values of k")));
    }
    let m = ctx.m();
    if !ctx.f_power_integral(m).is_finite() {
        return Ok(vec![EstimateCheck::not_applicable(id, "f is not in L^m")]);
    }
    let s = ctx.n / (ctx.n - 1.0);
    let power = if id == EstimateId::Iniziok { 1.0 / m } else { 0.5 / m };
    let mut table = Vec::new();
    for &k in &ks {
        for member in ctx.members {
            let u = &member.u;
            let lhs = match id {
                EstimateId::Iniziok => tail_energy(u, ctx.dim, k, s),
                _ => tail_gradient(u, ctx.dim, k),
            };
            let f_tail = integrate_data_where_at_least(u, ctx.dim, k, |r| ctx.spec.source.eval(r).abs().powf(m));
            table.push((k, member.truncation, lhs, f_tail.powf(power)));
        }
    }
    let c_hat = table
        .iter()
        .filter(|t| t.3 > 0.0)
        .map(|t| t.2 / t.3)
        .fold(0.0f64, f64::max);
    let orphan = table.iter().any(|t| t.2 > 0.0 && t.3 == 0.0);
    let sups: Vec<f64> = ks
        .iter()
        .map(|&k| table.iter().filter(|t| t.0 == k).map(|t| t.2).fold(0.0, f64::max))
        .collect();
    let ok = !orphan && c_hat.is_finite() && strictly_decreasing_to_zero(&sups);
    Ok(table
        .into_iter()
        .map(|(k, n, lhs, tail)| {
            let mut row = EstimateCheck::new(id, lhs, c_hat * tail);
            row.k = Some(k);
            row.n = n;
            row.verdict = Verdict::of(ok);
            row
        })
        .collect())
}

fn malaga(ctx: &Ctx<'_>) -> Result<Vec<EstimateCheck>> {
    let id = EstimateId::Malaga;
    if ctx.params.malaga_levels < 2 {
        return Err(Error::Input("equiintegrability check needs at least two sets".into()));
    }
    let f_l1 = ctx.f_integral(f64::abs);
    let (r0, big_r) = (ctx.spec.r_min(), ctx.spec.outer_radius);
    let radii: Vec<f64> = (1..=ctx.params.malaga_levels)
        .map(|j| r0 + (big_r - r0) * 0.5f64.powi(j as i32))
        .collect();
    let meas = |rho: f64| ball_volume(ctx.dim, rho) - ball_volume(ctx.dim, r0);
    let mut rows = Vec::new();
    for k in ctx.ks()? {
        let sqrt_tk1 = tk1_bound(k, ctx.spec.theta, f_l1, ctx.spec.alpha).sqrt();
        for member in ctx.members {
            let u = &member.u;
            let tail = tail_gradient(u, ctx.dim, k);
            for &rho in &radii {
                let lhs = inner_gradient(u, ctx.dim, rho);
                let mut row = EstimateCheck::new(id, lhs, meas(rho).sqrt() * sqrt_tk1 + tail);
                row.k = Some(k);
                row.n = member.truncation;
                row.radius = Some(rho);
                rows.push(ctx.explicit(row, u));
            }
        }
    }
    // sup over the sequence of int_E |grad u_n|, each compared with the
    // previous (larger) set
    let sup = |rho: f64| ctx.members.iter().map(|m| inner_gradient(&m.u, ctx.dim, rho)).fold(0.0, f64::max);
    let mut prev = sup(big_r);
    for &rho in &radii {
        let cur = sup(rho);
        let mut row = EstimateCheck::new(id, cur, prev);
        row.radius = Some(rho);
        row.explicit = false;
        row.verdict = Verdict::of(cur < prev);
        row.note = Some("sup over the sequence on shrinking sets".into());
        rows.push(row);
        prev = cur;
    }
    Ok(rows)
}

fn camino(ctx: &Ctx<'_>, shifted: bool) -> Result<Vec<EstimateCheck>> {
    let id = if shifted { EstimateId::Camino } else { EstimateId::Camino0 };
    let rho = ctx.rho()?;
    let theta = ctx.spec.theta;
    let alpha = ctx.spec.alpha;
    let mut ks = ctx.ks()?;
    if shifted {
        ks.retain(|k| *k >= 1.0);
        if ks.is_empty() {
            return Err(Error::Input("CAMINO needs some k >= 1".into()));
        }
    } else if ks[0] != 0.0 {
        ks.insert(0, 0.0);
    }
    let entropy = |f: f64| {
        let x = f.abs() / rho;
        x * x.ln_1p()
    };
    let mut rows = Vec::new();
    for &k in &ks {
        for member in ctx.members {
            let u = &member.u;
            let data = integrate_data_where_at_least(u, ctx.dim, k, |r| entropy(ctx.spec.source.eval(r)));
            let lv = [k, -k];
            let at_least = |v: f64| v.abs() >= k;
            let (lhs, growth) = if shifted {
                let lhs = alpha / 2f64.powf(theta + 1.0)
                    * integrate_field_where(u, ctx.dim, &lv, at_least, |_, v, dv| dv * dv * v.abs().powf(-(theta + 1.0)));
                let g = 2f64.powf(rho) * integrate_field_where(u, ctx.dim, &lv, at_least, |_, v, _| v.abs().powf(rho));
                (lhs, g)
            } else {
                let lhs = alpha * tail_energy(u, ctx.dim, k, theta + 1.0);
                let g = integrate_field_where(u, ctx.dim, &lv, at_least, |_, v, _| (1.0 + v.abs()).powf(rho));
                (lhs, g)
            };
            let mut row = EstimateCheck::new(id, lhs, data + growth);
            row.k = Some(k);
            row.rho = Some(rho);
            row.n = member.truncation;
            rows.push(ctx.explicit(row, u));
        }
    }
    Ok(rows)
}

fn bar(ctx: &Ctx<'_>) -> Result<Vec<EstimateCheck>> {
    if ctx.params.samples == 0 {
        return Err(Error::Input("BAR needs at least one sample".into()));
    }
    let hi = (ctx.n - 2.0) / (ctx.n - 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.params.seed);
    let open = |rng: &mut ChaCha8Rng, top: f64| loop {
        let x = rng.gen_range(0.0..top);
        if x > 0.0 {
            break x;
        }
    };
    let mut worst = 0.0f64;
    let mut violations = 0usize;
    for _ in 0..ctx.params.samples {
        let a = open(&mut rng, 1e6);
        let b = open(&mut rng, 1e6);
        let rho = open(&mut rng, hi);
        let (l, r) = bar_sides(a, b, rho);
        if l > r {
            violations += 1;
        }
        worst = worst.max(l / r);
    }
    let mut row = EstimateCheck::new(EstimateId::Bar, worst, 1.0);
    row.verdict = Verdict::of(violations == 0);
    row.note = Some(format!("{violations} violations in {} samples (lhs/rhs ratio)", ctx.params.samples));
    Ok(vec![row])
}

fn llogl(ctx: &Ctx<'_>) -> Result<Vec<EstimateCheck>> {
    let e = ctx.dim as i32 - 1;
    let (r0, big_r) = (ctx.spec.r_min(), ctx.spec.outer_radius);
    let h = |r: f64| {
        let f = ctx.spec.source.eval(r).abs();
        f * f.ln_1p() * r.powi(e)
    };
    // partial integrals over [eps, R] as eps decreases by decades
    let family: Vec<f64> = (1..=16)
        .map(|j| {
            let eps = (big_r * 10f64.powi(-j)).max(r0);
            ctx.omega * integrate_radial(eps, big_r, h)
        })
        .collect();
    let (ok, bound) = bounded_family(&family);
    let total = ctx.omega * integrate_radial(r0, big_r, h);
    let mut row = EstimateCheck::new(EstimateId::Llogl, total, bound);
    row.verdict = Verdict::of(ok && total.is_finite());
    Ok(vec![row])
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_real).unwrap_or_default()
}

/// Ledger CSV `estimate,k,p,rho,n,lhs,rhs,allowance,passed`.
pub fn write_ledger_csv<W: Write + ?Sized>(out: &mut W, rows: &[EstimateCheck]) -> Result<()> {
    writeln!(out, "estimate,k,p,rho,n,lhs,rhs,allowance,passed")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.id,
            opt(r.k),
            opt(r.p),
            opt(r.rho),
            opt(r.n),
            fmt_real(r.lhs),
            fmt_real(r.rhs),
            fmt_real(r.allowance),
            r.verdict.label()
        )?;
    }
    Ok(())
}
