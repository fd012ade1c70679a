//! Scalar nonlinear maps: truncation, the flux-linearizing transform and
//! the test-function maps of the a-priori estimates.
//!
//! Every map is written as `sign(u) * g(|u|)`, which makes oddness exact in
//! floating point. Powers of `1 + |u|` go through `ln_1p`/`exp_m1`, so large
//! arguments never overflow before the final result does.

use crate::error::{domain, Error, Result};

/// `T_k(s)`: clamp `s` into `[-k, k]`.
pub fn truncate(k: f64, s: f64) -> Result<f64> {
    if !(k >= 0.0) {
        return domain(format!("truncation level must be nonnegative, got {k}"));
    }
    Ok(clamp_sym(k, s))
}

#[inline]
pub(crate) fn clamp_sym(k: f64, s: f64) -> f64 {
    if s.abs() <= k {
        s
    } else {
        k.copysign(s)
    }
}

#[inline]
fn odd(u: f64, magnitude: f64) -> f64 {
    if u < 0.0 {
        -magnitude
    } else {
        magnitude
    }
}

/// `(1 + x)^e - 1` for `x >= 0` without cancellation.
#[inline]
fn pow1p_m1(x: f64, e: f64) -> f64 {
    (e * x.ln_1p()).exp_m1()
}

/// The primitive of `(1 + |u|)^(-theta)` vanishing at zero.
///
/// For `theta < 1` this is `sign(u)((1+|u|)^(1-theta) - 1)/(1-theta)`, for
/// `theta = 1` it is `sign(u) log(1+|u|)`.
#[inline]
pub fn psi(theta: f64, u: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&theta));
    if theta == 0.0 {
        return u;
    }
    let a = u.abs();
    let g = if theta == 1.0 {
        a.ln_1p()
    } else {
        let e = 1.0 - theta;
        pow1p_m1(a, e) / e
    };
    odd(u, g)
}

/// Inverse of [`psi`]. Both maps are bijections of the real line.
#[inline]
pub fn psi_inverse(theta: f64, w: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&theta));
    let a = w.abs();
    let g = if theta == 1.0 {
        a.exp_m1()
    } else {
        let e = 1.0 - theta;
        ((e * a).ln_1p() / e).exp_m1()
    };
    odd(w, g)
}

/// `d psi / du = (1 + |u|)^(-theta)`.
#[inline]
pub fn psi_derivative(theta: f64, u: f64) -> f64 {
    (-theta * u.abs().ln_1p()).exp()
}

/// `((1+|u|)^p - 1) sign(u)`.
pub fn power_test(p: f64, u: f64) -> Result<f64> {
    check_power(p)?;
    Ok(odd(u, pow1p_m1(u.abs(), p)))
}

/// `[(1+|u|)^p - (1+k)^p]^+ sign(u)`; vanishes for `|u| <= k`.
pub fn shifted_power_test(p: f64, k: f64, u: f64) -> Result<f64> {
    check_power(p)?;
    if !(k >= 0.0) {
        return domain(format!("threshold must be nonnegative, got {k}"));
    }
    let a = u.abs();
    if a <= k {
        return Ok(0.0);
    }
    // (1+a)^p - (1+k)^p = (1+k)^p ((1 + (a-k)/(1+k))^p - 1)
    let base = ((a - k) / (1.0 + k)).ln_1p();
    let g = (p * k.ln_1p()).exp() * (p * base).exp_m1();
    Ok(odd(u, g))
}

/// `[log(1+|u|) - log(1+k)]^+ sign(u)`.
pub fn log_test(k: f64, u: f64) -> Result<f64> {
    if !(k >= 0.0) {
        return domain(format!("threshold must be nonnegative, got {k}"));
    }
    let a = u.abs();
    if a <= k {
        return Ok(0.0);
    }
    Ok(odd(u, ((a - k) / (1.0 + k)).ln_1p()))
}

/// `sign(u) ((1+|u|)^beta - 1) / beta`, the variable whose gradient is
/// `grad u / (1+|u|)^(1-beta)`.
///
/// Shifted to vanish at `u = 0`; gradients are unaffected.
pub fn energy_variable(beta: f64, u: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return domain(format!("energy exponent must lie in (0, 1), got {beta}"));
    }
    Ok(odd(u, pow1p_m1(u.abs(), beta) / beta))
}

fn check_power(p: f64) -> Result<()> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("test-function exponent must be positive, got {p}")))
    }
}

/// A validated degeneracy exponent with the transform pair attached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaTransform {
    theta: f64,
}

impl ThetaTransform {
    pub fn new(theta: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&theta) {
            Ok(Self { theta })
        } else {
            domain(format!("theta must lie in [0, 1], got {theta}"))
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn forward(&self, u: f64) -> f64 {
        psi(self.theta, u)
    }

    pub fn inverse(&self, w: f64) -> f64 {
        psi_inverse(self.theta, w)
    }

    /// Degenerate diffusion factor `(1+|u|)^(-theta)`.
    pub fn factor(&self, u: f64) -> f64 {
        psi_derivative(self.theta, u)
    }
}
