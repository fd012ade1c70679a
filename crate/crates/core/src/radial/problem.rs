//! Problem data: dimension, degeneracy, coefficient, source and domain.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transform::{clamp_sym, psi_inverse};

/// Radial profile of the diffusion coefficient `a(r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Coefficient {
    Constant { value: f64 },
    /// `base + amplitude * sin(frequency * r)`.
    Sinusoidal { base: f64, amplitude: f64, frequency: f64 },
}

impl Coefficient {
    pub fn constant(value: f64) -> Self {
        Coefficient::Constant { value }
    }

    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            Coefficient::Constant { value } => value,
            Coefficient::Sinusoidal { base, amplitude, frequency } => base + amplitude * (frequency * r).sin(),
        }
    }

    /// Bounds implied by the parameters alone.
    pub fn natural_bounds(&self) -> (f64, f64) {
        match *self {
            Coefficient::Constant { value } => (value, value),
            Coefficient::Sinusoidal { base, amplitude, .. } => (base - amplitude.abs(), base + amplitude.abs()),
        }
    }
}

/// Right-hand side `f(r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Source {
    /// `amp * r^(-gamma)`.
    PowerLaw { gamma: f64, amp: f64 },
    /// Piecewise linear interpolation of `values` at increasing `radii`.
    Tabulated { radii: Vec<f64>, values: Vec<f64> },
}

impl Source {
    pub fn power_law(gamma: f64, amp: f64) -> Self {
        Source::PowerLaw { gamma, amp }
    }

    pub fn zero() -> Self {
        Source::PowerLaw { gamma: 0.0, amp: 0.0 }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Source::PowerLaw { amp, .. } => *amp == 0.0,
            Source::Tabulated { values, .. } => values.iter().all(|v| *v == 0.0),
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Source::PowerLaw { gamma, amp } => {
                if *amp == 0.0 {
                    0.0
                } else {
                    amp * r.powf(-gamma)
                }
            }
            Source::Tabulated { radii, values } => interpolate(radii, values, r),
        }
    }

    /// Supremum of `|f|` on the domain starting at `r_min`, used to tell
    /// when a truncation is inactive.
    pub fn sup_abs(&self, r_min: f64, outer: f64) -> f64 {
        match self {
            Source::PowerLaw { gamma, amp } => {
                if *amp == 0.0 {
                    0.0
                } else if *gamma > 0.0 {
                    amp.abs() * r_min.powf(-gamma)
                } else {
                    amp.abs() * outer.powf(-gamma)
                }
            }
            Source::Tabulated { values, .. } => values.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }
}

fn interpolate(radii: &[f64], values: &[f64], r: f64) -> f64 {
    if radii.is_empty() {
        return 0.0;
    }
    if r <= radii[0] {
        return values[0];
    }
    let last = radii.len() - 1;
    if r >= radii[last] {
        return values[last];
    }
    let i = radii.partition_point(|x| *x <= r) - 1;
    let t = (r - radii[i]) / (radii[i + 1] - radii[i]);
    values[i] * (1.0 - t) + values[i + 1] * t
}

/// A source, optionally replaced by its truncation `T_n(f)`.
#[derive(Debug, Clone, Copy)]
pub struct SourceTerm<'a> {
    pub source: &'a Source,
    pub level: Option<f64>,
}

impl<'a> SourceTerm<'a> {
    pub fn plain(source: &'a Source) -> Self {
        Self { source, level: None }
    }

    pub fn truncated(source: &'a Source, level: f64) -> Self {
        Self { source, level: Some(level) }
    }

    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        let f = self.source.eval(r);
        match self.level {
            Some(n) => clamp_sym(n, f),
            None => f,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainMode {
    /// Full ball, natural condition at the centre.
    Ball,
    /// `r_min <= r <= outer`, with `u(r_min) = inner_value`.
    Annulus { r_min: f64, inner_value: f64 },
}

/// The radial model problem `-div(a grad u / (1+|u|)^theta) = f`, `u = 0`
/// on the outer sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub dim: u32,
    pub theta: f64,
    pub coefficient: Coefficient,
    /// Declared lower bound of the coefficient.
    pub alpha: f64,
    /// Declared upper bound of the coefficient.
    pub beta: f64,
    pub source: Source,
    pub mode: DomainMode,
    pub outer_radius: f64,
}

/// Samples used to confirm the declared coefficient bounds.
const BOUND_SAMPLES: usize = 10_000;

impl ProblemSpec {
    /// Ball problem on the unit ball with bounds taken from the coefficient.
    pub fn new(dim: u32, theta: f64, coefficient: Coefficient, source: Source) -> Self {
        let (alpha, beta) = coefficient.natural_bounds();
        Self { dim, theta, coefficient, alpha, beta, source, mode: DomainMode::Ball, outer_radius: 1.0 }
    }

    pub fn with_mode(mut self, mode: DomainMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_bounds(mut self, alpha: f64, beta: f64) -> Self {
        self.alpha = alpha;
        self.beta = beta;
        self
    }

    pub fn with_outer_radius(mut self, outer: f64) -> Self {
        self.outer_radius = outer;
        self
    }

    /// Annulus whose inner datum is taken from the closed-form solution.
    pub fn with_exact_annulus(mut self, r_min: f64) -> Result<Self> {
        self.mode = DomainMode::Annulus { r_min, inner_value: 0.0 };
        let w = self.exact_w(r_min).ok_or_else(|| {
            Error::InvalidSpec("no closed-form solution for this coefficient and source".into())
        })?;
        self.mode = DomainMode::Annulus { r_min, inner_value: psi_inverse(self.theta, w) };
        Ok(self)
    }

    pub fn r_min(&self) -> f64 {
        match self.mode {
            DomainMode::Ball => 0.0,
            DomainMode::Annulus { r_min, .. } => r_min,
        }
    }

    pub fn is_ball(&self) -> bool {
        matches!(self.mode, DomainMode::Ball)
    }

    pub fn inner_value(&self) -> Option<f64> {
        match self.mode {
            DomainMode::Ball => None,
            DomainMode::Annulus { inner_value, .. } => Some(inner_value),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.dim < 3 {
            return bad(format!("dimension must be at least 3, got {}", self.dim));
        }
        if !(0.0..=1.0).contains(&self.theta) {
            return bad(format!("theta must lie in [0, 1], got {}", self.theta));
        }
        if !(self.outer_radius > 0.0 && self.outer_radius.is_finite()) {
            return bad(format!("outer radius must be positive, got {}", self.outer_radius));
        }
        if !(self.alpha > 0.0 && self.alpha <= self.beta && self.beta.is_finite()) {
            return bad(format!("need 0 < alpha <= beta, got alpha = {}, beta = {}", self.alpha, self.beta));
        }
        if let DomainMode::Annulus { r_min, inner_value } = self.mode {
            if !(r_min > 0.0 && r_min < self.outer_radius) {
                return bad(format!("annulus needs 0 < r_min < outer radius, got r_min = {r_min}"));
            }
            if !inner_value.is_finite() {
                return bad("inner boundary value must be finite".into());
            }
        }
        let (lo, hi) = (self.r_min(), self.outer_radius);
        for i in 0..BOUND_SAMPLES {
            let r = lo + (hi - lo) * i as f64 / (BOUND_SAMPLES - 1) as f64;
            let a = self.coefficient.eval(r);
            if !(a >= self.alpha && a <= self.beta) {
                return bad(format!(
                    "coefficient a({r}) = {a} violates declared bounds [{}, {}]",
                    self.alpha, self.beta
                ));
            }
        }
        match &self.source {
            Source::PowerLaw { gamma, amp } => {
                if !gamma.is_finite() || !amp.is_finite() {
                    return bad("power-law parameters must be finite".into());
                }
                if self.is_ball() && *amp != 0.0 && *gamma >= self.dim as f64 {
                    return bad(format!(
                        "power-law source r^-{gamma} is not integrable on the ball in dimension {}",
                        self.dim
                    ));
                }
            }
            Source::Tabulated { radii, values } => {
                if radii.len() != values.len() || radii.len() < 2 {
                    return bad("tabulated source needs matching radii and values (at least 2)".into());
                }
                if radii.windows(2).any(|w| !(w[0] < w[1])) {
                    return bad("tabulated radii must be strictly increasing".into());
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return bad("tabulated source values must be finite".into());
                }
            }
        }
        Ok(())
    }

    /// Closed-form solution of the linear problem for `w = psi(theta, u)`
    /// with constant coefficient and an untruncated power-law source,
    /// vanishing at the outer radius with zero flux at the centre.
    pub fn exact_w(&self, r: f64) -> Option<f64> {
        let c = match self.coefficient {
            Coefficient::Constant { value } => value,
            _ => return None,
        };
        let (gamma, amp) = match self.source {
            Source::PowerLaw { gamma, amp } => (gamma, amp),
            _ => return None,
        };
        if amp == 0.0 {
            return Some(0.0);
        }
        let n = self.dim as f64;
        let big_r = self.outer_radius;
        if (gamma - n).abs() < 1e-14 {
            return None;
        }
        if (gamma - 2.0).abs() < 1e-14 {
            return Some(amp / c * (big_r / r).ln() / (n - 2.0));
        }
        let coef = -1.0 / ((2.0 - gamma) * (n - gamma));
        Some(amp / c * coef * (r.powf(2.0 - gamma) - big_r.powf(2.0 - gamma)))
    }

    /// Closed-form solution `u = psi^{-1}(theta, w)`.
    pub fn exact_u(&self, r: f64) -> Option<f64> {
        self.exact_w(r).map(|w| psi_inverse(self.theta, w))
    }

    /// Derivative of [`Self::exact_w`] in `r`.
    pub fn exact_w_derivative(&self, r: f64) -> Option<f64> {
        let c = match self.coefficient {
            Coefficient::Constant { value } => value,
            _ => return None,
        };
        let (gamma, amp) = match self.source {
            Source::PowerLaw { gamma, amp } => (gamma, amp),
            _ => return None,
        };
        let n = self.dim as f64;
        // r^{N-1} a w' = -amp r^{N-gamma}/(N-gamma)
        Some(-amp / c * r.powf(1.0 - gamma) / (n - gamma))
    }
}
