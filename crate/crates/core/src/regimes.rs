//! The (theta, m) regularity phase diagram.
//!
//! Classification compares the data against the curves
//! `m_lower = N/(N+1-theta(N-1))`, `m_upper = 2N/(N+2-theta(N-2))` and
//! `N/2`. Membership of the borderline curve is a measure-zero event, so
//! when both `theta` and `m` are known exactly (decimal or fraction input)
//! every comparison is done in rational arithmetic. Floating point inputs
//! fall back to an absolute tolerance of `1e-12`.

use std::fmt;
use std::io::Write;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::format::fmt_real;

/// Absolute tolerance for boundary comparisons on floating point data.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// A classification parameter, exact when it came from a decimal or
/// fraction literal.
#[derive(Debug, Clone, PartialEq)]
pub enum Param {
    Exact(BigRational),
    Real(f64),
}

impl Param {
    pub fn to_f64(&self) -> f64 {
        match self {
            Param::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
            Param::Real(x) => *x,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Param::Exact(_))
    }
}

impl From<f64> for Param {
    fn from(x: f64) -> Self {
        Param::Real(x)
    }
}

impl From<i64> for Param {
    fn from(n: i64) -> Self {
        Param::Exact(BigRational::from_integer(BigInt::from(n)))
    }
}

impl From<BigRational> for Param {
    fn from(q: BigRational) -> Self {
        Param::Exact(q)
    }
}

impl FromStr for Param {
    type Err = Error;

    /// Decimal (`0.75`, `-1.5e-2`) and fraction (`24/17`) literals parse
    /// exactly; anything else that parses as `f64` is kept as a real.
    fn from_str(s: &str) -> Result<Self> {
        if let Some(q) = parse_rational(s) {
            return Ok(Param::Exact(q));
        }
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .map(Param::Real)
            .ok_or_else(|| Error::Domain(format!("cannot parse number `{s}`")))
    }
}

/// Parses `a/b` or a finite decimal literal with optional exponent into a
/// rational number.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_rational(num)?;
        let d = parse_rational(den)?;
        if d.is_zero() {
            return None;
        }
        return Some(n / d);
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(all.parse::<BigInt>().ok()?);
    let shift = exp - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    if shift >= 0 {
        value *= num_traits::pow(ten, shift as usize);
    } else {
        value /= num_traits::pow(ten, (-shift) as usize);
    }
    Some(if neg { -value } else { value })
}

/// Arithmetic used by the classifier: exact for rationals, tolerant for
/// floats.
trait Scalar:
    Clone
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn int(n: i64) -> Self;
    fn same(&self, other: &Self) -> bool;
    fn real(&self) -> f64;

    fn below(&self, other: &Self) -> bool {
        self < other && !self.same(other)
    }
    fn at_most(&self, other: &Self) -> bool {
        self < other || self.same(other)
    }
    fn above(&self, other: &Self) -> bool {
        other.below(self)
    }
    fn at_least(&self, other: &Self) -> bool {
        other.at_most(self)
    }
}

impl Scalar for f64 {
    fn int(n: i64) -> Self {
        n as f64
    }
    fn same(&self, other: &Self) -> bool {
        (self - other).abs() <= BOUNDARY_TOL
    }
    fn real(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    fn int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn same(&self, other: &Self) -> bool {
        self == other
    }
    fn real(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

struct Curves<T> {
    m_lower: T,
    m_upper: T,
    m_linfty: T,
}

fn curves<T: Scalar>(n: i64, theta: &T) -> Curves<T> {
    let nn = T::int(n);
    Curves {
        m_lower: nn.clone() / (T::int(n + 1) - theta.clone() * T::int(n - 1)),
        m_upper: T::int(2 * n) / (T::int(n + 2) - theta.clone() * T::int(n - 2)),
        m_linfty: nn / T::int(2),
    }
}

fn q_generic<T: Scalar>(n: i64, theta: &T, m: &T) -> Option<T> {
    let one = T::int(1);
    let den = T::int(n) - m.clone() * (one.clone() + theta.clone());
    if !den.above(&T::int(0)) || !theta.below(&one) {
        return None;
    }
    Some(T::int(n) * m.clone() * (one - theta.clone()) / den)
}

fn m_star_star_generic<T: Scalar>(n: i64, m: &T) -> Option<T> {
    let den = T::int(n) - T::int(2) * m.clone();
    if !den.above(&T::int(0)) {
        return None;
    }
    Some(T::int(n) * m.clone() / den)
}

/// The three critical integrability exponents at fixed `(N, theta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalValues {
    pub m_lower: f64,
    pub m_upper: f64,
    pub m_linfty: f64,
}

fn check_dim(n: u32) -> Result<()> {
    if n >= 3 {
        Ok(())
    } else {
        domain(format!("dimension must be at least 3, got {n}"))
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&theta) {
        Ok(())
    } else {
        domain(format!("theta must lie in [0, 1], got {theta}"))
    }
}

/// `(m*, m**) = (Nm/(N-m), Nm/(N-2m))`.
pub fn sobolev_conjugates(n: u32, m: f64) -> Result<(f64, f64)> {
    let star = sobolev_conjugate(n, m)?;
    let star_star = double_sobolev_conjugate(n, m)?;
    Ok((star, star_star))
}

/// `m* = Nm/(N-m)`, defined for `1 <= m < N`.
pub fn sobolev_conjugate(n: u32, m: f64) -> Result<f64> {
    let nf = n as f64;
    if !(m >= 1.0 && m < nf) {
        return domain(format!("m* = Nm/(N-m) needs 1 <= m < N, got m = {m}, N = {n}"));
    }
    Ok(nf * m / (nf - m))
}

/// `m** = Nm/(N-2m)`, defined for `1 <= m < N/2`.
pub fn double_sobolev_conjugate(n: u32, m: f64) -> Result<f64> {
    let nf = n as f64;
    if !(m >= 1.0 && m < nf / 2.0) {
        return domain(format!("m** = Nm/(N-2m) needs 1 <= m < N/2, got m = {m}, N = {n}"));
    }
    Ok(nf * m / (nf - 2.0 * m))
}

pub fn critical_m_values(n: u32, theta: f64) -> Result<CriticalValues> {
    check_dim(n)?;
    check_theta(theta)?;
    let c = curves(n as i64, &theta);
    Ok(CriticalValues { m_lower: c.m_lower, m_upper: c.m_upper, m_linfty: c.m_linfty })
}

/// Gradient integrability exponent `q = Nm(1-theta)/(N-m(1+theta))`.
pub fn q_exponent(n: u32, theta: f64, m: f64) -> Result<f64> {
    let nf = n as f64;
    let den = nf - m * (1.0 + theta);
    if !(den > 0.0) || !(theta < 1.0) {
        return domain(format!(
            "q needs N - m(1+theta) > 0 and theta < 1 (N = {n}, theta = {theta}, m = {m})"
        ));
    }
    Ok(nf * m * (1.0 - theta) / den)
}

/// Data of one point of the phase plane.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassPoint {
    pub dim: u32,
    pub theta: Param,
    pub m: Param,
    /// Whether `f log(1+|f|)` is integrable; only consulted at `m = 1`.
    pub f_in_llogl: bool,
}

impl ClassPoint {
    pub fn new(dim: u32, theta: impl Into<Param>, m: impl Into<Param>, f_in_llogl: bool) -> Self {
        Self { dim, theta: theta.into(), m: m.into(), f_in_llogl }
    }

    pub fn validate(&self) -> Result<()> {
        check_dim(self.dim)?;
        let theta = self.theta.to_f64();
        let m = self.m.to_f64();
        check_theta(theta)?;
        if !(m >= 1.0) || !m.is_finite() {
            return domain(format!("m must be at least 1, got {m}"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Region {
    A,
    B,
    C,
    D,
    CurveThm1,
    PointThm2,
    ThetaOne,
    Uncovered,
}

impl Region {
    pub fn label(&self) -> &'static str {
        match self {
            Region::A => "A",
            Region::B => "B",
            Region::C => "C",
            Region::D => "D",
            Region::CurveThm1 => "CurveThm1",
            Region::PointThm2 => "PointThm2",
            Region::ThetaOne => "ThetaOne",
            Region::Uncovered => "Uncovered",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Sobolev,
    Lebesgue,
    Marcinkiewicz,
    LInfinity,
}

/// Which object the membership is claimed for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    Solution,
    Gradient,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpaceMembership {
    pub of: Quantity,
    pub kind: SpaceKind,
    /// `None` for `L^inf`, and for Lebesgue membership "for every finite p".
    pub exponent: Option<f64>,
    pub label: String,
}

impl SpaceMembership {
    fn new(of: Quantity, kind: SpaceKind, exponent: Option<f64>) -> Self {
        let e = exponent.map(|x| format!("{x}"));
        let body = match (kind, e) {
            (SpaceKind::Sobolev, Some(e)) => format!("W^{{1,{e}}}"),
            (SpaceKind::Lebesgue, Some(e)) => format!("L^{{{e}}}"),
            (SpaceKind::Lebesgue, None) => "L^p (every p<inf)".to_string(),
            (SpaceKind::Marcinkiewicz, Some(e)) => format!("M^{{{e}}}"),
            (SpaceKind::LInfinity, _) => "L^inf".to_string(),
            (_, None) => "?".to_string(),
        };
        let label = match of {
            Quantity::Solution => body,
            Quantity::Gradient => format!("|grad u| in {body}"),
        };
        Self { of, kind, exponent, label }
    }

    fn sobolev(p: f64) -> Self {
        Self::new(Quantity::Solution, SpaceKind::Sobolev, Some(p))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolutionNotion {
    Weak,
    Distributional,
    Entropy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeReport {
    pub region: Region,
    pub solution_space: Vec<SpaceMembership>,
    pub solution_notion: Option<SolutionNotion>,
    pub boundary_values: CriticalValues,
}

/// Assigns the unique region of a point of the phase plane.
pub fn classify(point: &ClassPoint) -> Result<RegimeReport> {
    point.validate()?;
    let n = point.dim as i64;
    let llogl = point.f_in_llogl;
    let (region, aux) = match (&point.theta, &point.m) {
        (Param::Exact(t), Param::Exact(m)) => classify_generic(n, t, m, llogl),
        (t, m) => classify_generic(n, &t.to_f64(), &m.to_f64(), llogl),
    };
    let theta = point.theta.to_f64();
    let m = point.m.to_f64();
    let c = curves(n, &theta);
    let boundary_values =
        CriticalValues { m_lower: c.m_lower, m_upper: c.m_upper, m_linfty: c.m_linfty };

    use Quantity::*;
    use SpaceKind::*;
    let (spaces, notion) = match region {
        Region::ThetaOne => (
            vec![SpaceMembership::sobolev(2.0), SpaceMembership::new(Solution, Lebesgue, None)],
            Some(SolutionNotion::Weak),
        ),
        Region::A => (
            vec![SpaceMembership::sobolev(2.0), SpaceMembership::new(Solution, LInfinity, None)],
            Some(SolutionNotion::Weak),
        ),
        Region::B => {
            let mut v = vec![SpaceMembership::sobolev(2.0)];
            if let Some(mss) = aux.m_star_star {
                v.push(SpaceMembership::new(Solution, Lebesgue, Some(mss * (1.0 - theta))));
            }
            (v, Some(SolutionNotion::Weak))
        }
        Region::CurveThm1 | Region::PointThm2 => {
            (vec![SpaceMembership::sobolev(1.0)], Some(SolutionNotion::Distributional))
        }
        Region::C => {
            let q = aux.q.unwrap_or_else(|| q_exponent(point.dim, theta, m).unwrap_or(f64::NAN));
            (vec![SpaceMembership::sobolev(q)], Some(SolutionNotion::Distributional))
        }
        Region::D => {
            let mut v = Vec::new();
            if let Some(mss) = aux.m_star_star {
                v.push(SpaceMembership::new(Solution, Marcinkiewicz, Some(mss * (1.0 - theta))));
            }
            if let Some(q) = aux.q {
                v.push(SpaceMembership::new(Gradient, Marcinkiewicz, Some(q)));
            }
            (v, Some(SolutionNotion::Entropy))
        }
        Region::Uncovered => (Vec::new(), None),
    };
    Ok(RegimeReport { region, solution_space: spaces, solution_notion: notion, boundary_values })
}

struct Aux {
    m_star_star: Option<f64>,
    q: Option<f64>,
}

fn classify_generic<T: Scalar>(n: i64, theta: &T, m: &T, llogl: bool) -> (Region, Aux) {
    let one = T::int(1);
    let c = curves(n, theta);
    let aux = Aux {
        m_star_star: m_star_star_generic(n, m).map(|x| x.real()),
        q: q_generic(n, theta, m).map(|x| x.real()),
    };
    let critical_theta = one.clone() / T::int(n - 1);

    let region = if theta.same(&one) {
        Region::ThetaOne
    } else if m.above(&c.m_linfty) {
        Region::A
    } else if c.m_upper.at_most(m) && m.below(&c.m_linfty) {
        Region::B
    } else if m.same(&c.m_lower) && critical_theta.below(theta) && theta.below(&one) {
        Region::CurveThm1
    } else if c.m_lower.below(m) && m.below(&c.m_upper) && theta.at_least(&critical_theta) {
        Region::C
    } else if theta.same(&critical_theta) && m.same(&one) && llogl {
        Region::PointThm2
    } else {
        let d_upper = if c.m_lower.above(&one) { c.m_lower.clone() } else { one.clone() };
        if one.at_most(m) && m.at_most(&d_upper) {
            Region::D
        } else {
            Region::Uncovered
        }
    };
    (region, aux)
}

/// One sample of the phase diagram.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseCell {
    pub theta: f64,
    pub m: f64,
    pub region: Region,
}

/// Classifies an inclusive grid with `theta_steps` subdivisions of
/// `[0, 1]` and `m_steps` subdivisions of `[m_min, m_max]`.
///
/// Grid coordinates are generated as exact rationals whenever the bounds
/// are exact, so sampled points that land on a critical curve are
/// classified as such. Rows are ordered theta-major.
pub fn phase_diagram_grid(
    dim: u32,
    theta_steps: usize,
    m_min: impl Into<Param>,
    m_max: impl Into<Param>,
    m_steps: usize,
) -> Result<Vec<PhaseCell>> {
    check_dim(dim)?;
    if theta_steps < 2 || m_steps < 2 {
        return domain("phase diagram needs at least 2 steps per axis");
    }
    let m_min = m_min.into();
    let m_max = m_max.into();
    if !(m_min.to_f64() >= 1.0 && m_min.to_f64() < m_max.to_f64()) {
        return domain(format!(
            "phase diagram needs 1 <= m_min < m_max, got [{}, {}]",
            m_min.to_f64(),
            m_max.to_f64()
        ));
    }
    let exact = match (&m_min, &m_max) {
        (Param::Exact(a), Param::Exact(b)) => Some((a.clone(), b.clone())),
        _ => None,
    };
    let mut cells = Vec::with_capacity((theta_steps + 1) * (m_steps + 1));
    for i in 0..=theta_steps {
        let theta = BigRational::new(BigInt::from(i), BigInt::from(theta_steps));
        for j in 0..=m_steps {
            let m = match &exact {
                Some((a, b)) => {
                    let t = BigRational::new(BigInt::from(j), BigInt::from(m_steps));
                    Param::Exact(a.clone() + (b.clone() - a.clone()) * t)
                }
                None => {
                    let (a, b) = (m_min.to_f64(), m_max.to_f64());
                    Param::Real(a + (b - a) * j as f64 / m_steps as f64)
                }
            };
            let point = ClassPoint::new(dim, Param::Exact(theta.clone()), m.clone(), false);
            let report = classify(&point)?;
            cells.push(PhaseCell { theta: point.theta.to_f64(), m: m.to_f64(), region: report.region });
        }
    }
    Ok(cells)
}

/// Writes `theta,m,region` rows.
pub fn write_phase_csv<W: Write>(mut out: W, cells: &[PhaseCell]) -> std::io::Result<()> {
    writeln!(out, "theta,m,region")?;
    for c in cells {
        writeln!(out, "{},{},{}", fmt_real(c.theta), fmt_real(c.m), c.region)?;
    }
    Ok(())
}

/// `1/(N-1)`, the smallest theta at which region C is nonempty.
pub fn critical_theta(dim: u32) -> f64 {
    1.0 / (dim as f64 - 1.0)
}
