//! Blow-up rates of discrete solutions: log-log slope fits near the origin
//! and the empirical integrability threshold of the gradient.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::norms::gradient_power_integral;
use crate::error::{domain, Error, Result};
use crate::radial::mesh::{NodalField, RadialMesh};
use crate::radial::problem::{DomainMode, ProblemSpec, Source};
use crate::radial::solver::oracle_solve;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentFit {
    pub fitted_slope: f64,
    pub window: (f64, f64),
    /// Sum of squared residuals of the least-squares line.
    pub residual: f64,
    pub points: usize,
    pub predicted: Option<f64>,
    pub relative_gap: Option<f64>,
}

impl ExponentFit {
    pub fn with_prediction(mut self, predicted: f64) -> Self {
        self.predicted = Some(predicted);
        self.relative_gap = Some(relative_gap(self.fitted_slope, predicted));
        self
    }
}

fn relative_gap(fitted: f64, predicted: f64) -> f64 {
    if predicted == 0.0 {
        fitted.abs()
    } else {
        ((fitted - predicted) / predicted).abs()
    }
}

/// Least-squares slope of `log u` against `log r` over the nodes in
/// `[r_a, r_b]`.
pub fn fit_decay_slope(field: &NodalField, window: (f64, f64)) -> Result<ExponentFit> {
    let (ra, rb) = window;
    let outer = field.mesh().outer();
    if !(ra > 0.0 && ra < rb && rb <= outer) {
        return Err(Error::Input(format!("invalid fit window ({ra}, {rb})")));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&r, &u) in field.mesh().nodes().iter().zip(field.values()) {
        if r < ra || r > rb {
            continue;
        }
        if !(u > 0.0) {
            return domain(format!("field must be positive on the fit window, u({r}) = {u}"));
        }
        xs.push(r.ln());
        ys.push(u.ln());
    }
    if xs.len() < 8 {
        return Err(Error::Input(format!("fit window holds {} nodes, need at least 8", xs.len())));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let icept = my - slope * mx;
    let residual = xs.iter().zip(&ys).map(|(x, y)| (y - icept - slope * x).powi(2)).sum();
    Ok(ExponentFit {
        fitted_slope: slope,
        window,
        residual,
        points: xs.len(),
        predicted: None,
        relative_gap: None,
    })
}

/// Blow-up rate `(2 - gamma)/(1 - theta)` of `u` at the origin for a power
/// source with `2 < gamma < N`; `None` when `u` stays bounded or the rate
/// is not a power.
pub fn predicted_decay_slope(spec: &ProblemSpec) -> Option<f64> {
    match spec.source {
        Source::PowerLaw { gamma, amp } if amp != 0.0 && gamma > 2.0 && gamma < spec.dim as f64 && spec.theta < 1.0 => {
            Some((2.0 - gamma) / (1.0 - spec.theta))
        }
        _ => None,
    }
}

/// Power-counting threshold `N / (1 - s)` for `|u'|^q`, `s` the decay
/// slope of `u`.
pub fn predicted_gradient_threshold(spec: &ProblemSpec) -> Option<f64> {
    predicted_decay_slope(spec).map(|s| spec.dim as f64 / (1.0 - s))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdConfig {
    pub q_range: (f64, f64),
    /// Cell counts, increasing; at least three.
    pub refinements: Vec<usize>,
    pub grading: f64,
    /// Growth beyond `1 + delta` per refinement counts as blow-up.
    pub delta: f64,
    pub scan_points: usize,
    pub tolerance: f64,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        Self {
            q_range: (1.0, 2.0),
            refinements: vec![256, 512, 1024, 2048, 4096],
            grading: 3.0,
            delta: 0.05,
            scan_points: 17,
            tolerance: 1e-5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdEstimate {
    /// Crossover exponent; `None` when the scan was not monotone.
    pub q_star: Option<f64>,
    /// Bracket containing the crossover.
    pub interval: (f64, f64),
    /// No exponent in range showed blow-up; `q_star` is then `q_hi`.
    pub no_blow_up: bool,
    pub monotone: bool,
    pub predicted: Option<f64>,
    /// `(q, growth ratios between successive refinements)` of the scan.
    pub scan: Vec<(f64, Vec<f64>)>,
}

struct Refinements {
    solutions: Vec<NodalField>,
    dim: u32,
    delta: f64,
}

impl Refinements {
    fn ratios(&self, q: f64) -> Vec<f64> {
        let ints: Vec<f64> = self.solutions.iter().map(|u| gradient_power_integral(u, q, self.dim)).collect();
        ints.windows(2)
            .map(|w| if w[0] > 0.0 && w[1].is_finite() { w[1] / w[0] } else { 1.0 })
            .collect()
    }

    /// Growth persisting over the last two refinement steps.
    fn blows_up(&self, q: f64) -> bool {
        let r = self.ratios(q);
        r[r.len() - 2..].iter().all(|x| *x > 1.0 + self.delta)
    }
}

/// Empirical `q*` such that `int |u'|^q` stays bounded under refinement
/// for `q < q*` and grows for `q > q*` (ball mode, oracle solutions).
pub fn gradient_integrability_threshold(
    spec: &ProblemSpec,
    q_range: (f64, f64),
    refinements: &[usize],
) -> Result<ThresholdEstimate> {
    let config = ThresholdConfig { q_range, refinements: refinements.to_vec(), ..ThresholdConfig::default() };
    gradient_integrability_threshold_with(spec, &config)
}

pub fn gradient_integrability_threshold_with(spec: &ProblemSpec, config: &ThresholdConfig) -> Result<ThresholdEstimate> {
    let (q_lo, q_hi) = config.q_range;
    if !(q_lo < q_hi && q_lo > 0.0 && q_hi.is_finite()) {
        return Err(Error::Input(format!("invalid q range ({q_lo}, {q_hi})")));
    }
    let levels = &config.refinements;
    if levels.len() < 3 || levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Input("need at least three increasing refinement levels".into()));
    }
    if config.scan_points < 2 {
        return Err(Error::Input("threshold scan needs at least two points".into()));
    }
    let ball = spec.clone().with_mode(DomainMode::Ball);
    ball.validate()?;
    let solutions = levels
        .par_iter()
        .map(|&m| {
            let mesh = Arc::new(RadialMesh::graded(0.0, ball.outer_radius, m, config.grading, true)?);
            oracle_solve(&ball, &mesh).map(|r| r.u)
        })
        .collect::<Result<Vec<_>>>()?;
    let data = Refinements { solutions, dim: ball.dim, delta: config.delta };

    let k = config.scan_points;
    let qs: Vec<f64> = (0..k).map(|i| q_lo + (q_hi - q_lo) * i as f64 / (k - 1) as f64).collect();
    let scan: Vec<(f64, Vec<f64>)> = qs.iter().map(|&q| (q, data.ratios(q))).collect();
    let flags: Vec<bool> = qs.iter().map(|&q| data.blows_up(q)).collect();
    let predicted = predicted_gradient_threshold(&ball);
    let first_up = flags.iter().position(|b| *b);
    let monotone = match first_up {
        Some(i) => flags[i..].iter().all(|b| *b),
        None => true,
    };
    let estimate = |q_star, interval, no_blow_up, monotone| ThresholdEstimate {
        q_star,
        interval,
        no_blow_up,
        monotone,
        predicted,
        scan: scan.clone(),
    };
    let Some(first_up) = first_up else {
        return Ok(estimate(Some(q_hi), (q_hi, q_hi), true, true));
    };
    if !monotone {
        let last_down = flags.iter().rposition(|b| !*b).unwrap_or(0);
        return Ok(estimate(None, (qs[first_up], qs[last_down]), false, false));
    }
    if first_up == 0 {
        return Ok(estimate(Some(q_lo), (q_lo, q_lo), false, true));
    }
    let (mut lo, mut hi) = (qs[first_up - 1], qs[first_up]);
    while hi - lo > config.tolerance {
        let mid = 0.5 * (lo + hi);
        if data.blows_up(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(estimate(Some(0.5 * (lo + hi)), (lo, hi), false, true))
}

/// Slope fit plus optional threshold search, as exported by the exponent
/// study.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentStudy {
    pub predicted: Option<f64>,
    pub fitted: f64,
    pub relative_gap: Option<f64>,
    pub window: (f64, f64),
    pub residual: f64,
    /// `u` shows no power blow-up at the origin.
    pub no_blow_up: bool,
    pub gradient_threshold: Option<ThresholdEstimate>,
}

/// Fitted slopes flatter than this count as bounded behavior.
pub const BLOW_UP_SLOPE: f64 = -0.05;

impl ExponentStudy {
    pub fn from_fit(fit: &ExponentFit, threshold: Option<ThresholdEstimate>) -> Self {
        Self {
            predicted: fit.predicted,
            fitted: fit.fitted_slope,
            relative_gap: fit.relative_gap,
            window: fit.window,
            residual: fit.residual,
            no_blow_up: fit.fitted_slope > BLOW_UP_SLOPE,
            gradient_threshold: threshold,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::problem::Coefficient;

    fn ball(cells: usize) -> Arc<RadialMesh> {
        Arc::new(RadialMesh::graded(0.0, 1.0, cells, 3.0, true).unwrap())
    }

    #[test]
    fn pure_powers() {
        for s in [0.5, 1.0, 1.6, 2.0] {
            let mut v = NodalField::from_fn(ball(1024), |r| r.powf(-s)).into_values();
            v[0] = f64::MAX;
            let u = NodalField::new(ball(1024), v).unwrap();
            let fit = fit_decay_slope(&u, (1e-6, 1e-3)).unwrap().with_prediction(-s);
            assert!(fit.relative_gap.unwrap() < 1e-3, "{fit:?}");
            assert!(fit.residual >= 0.0);
        }
    }

    #[test]
    fn shifted_inverse_square() {
        let mesh = ball(4096);
        let u = NodalField::from_fn(mesh, |r| if r > 0.0 { r.powi(-2) - 1.0 } else { 1.0 });
        let fit = fit_decay_slope(&u, (1e-3, 1e-2)).unwrap();
        assert!((fit.fitted_slope + 2.0).abs() < 0.02);
    }

    #[test]
    fn constant_and_errors() {
        let u = NodalField::from_fn(ball(1024), |_| 3.0);
        assert!(fit_decay_slope(&u, (1e-6, 1e-3)).unwrap().fitted_slope.abs() < 1e-12);
        assert!(fit_decay_slope(&u, (1e-3, 1e-4)).is_err());
        assert!(fit_decay_slope(&u, (0.5, 0.51)).is_err());
        let z = NodalField::zeros(ball(1024));
        assert!(matches!(fit_decay_slope(&z, (1e-6, 1e-3)), Err(Error::Domain(_))));
    }

    #[test]
    fn predictions() {
        let spec = ProblemSpec::new(3, 0.75, Coefficient::constant(1.0), Source::power_law(2.4, 1.0));
        assert!((predicted_decay_slope(&spec).unwrap() + 1.6).abs() < 1e-12);
        assert!((predicted_gradient_threshold(&spec).unwrap() - 15.0 / 13.0).abs() < 1e-12);
        let regular = ProblemSpec::new(3, 0.75, Coefficient::constant(1.0), Source::power_law(1.0, 1.0));
        assert_eq!(predicted_decay_slope(&regular), None);
    }

    #[test]
    fn zero_source_has_no_crossover() {
        let spec = ProblemSpec::new(3, 0.75, Coefficient::constant(1.0), Source::zero());
        let est = gradient_integrability_threshold(&spec, (1.0, 2.0), &[32, 64, 128]).unwrap();
        assert!(est.no_blow_up);
        assert_eq!(est.q_star, Some(2.0));
        assert!(gradient_integrability_threshold(&spec, (2.0, 1.0), &[32, 64, 128]).is_err());
        assert!(gradient_integrability_threshold(&spec, (1.0, 2.0), &[32, 64]).is_err());
    }
}
