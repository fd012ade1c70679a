//! Gauss–Legendre rules and radial integration helpers.

/// A Gauss–Legendre rule on `[-1, 1]`.
pub struct GaussRule {
    pub points: &'static [f64],
    pub weights: &'static [f64],
}

pub const GAUSS3: GaussRule = GaussRule {
    points: &[-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4],
    weights: &[5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0],
};

pub const GAUSS5: GaussRule = GaussRule {
    points: &[
        -0.906_179_845_938_664,
        -0.538_469_310_105_683,
        0.0,
        0.538_469_310_105_683,
        0.906_179_845_938_664,
    ],
    weights: &[
        0.236_926_885_056_189_1,
        0.478_628_670_499_366_5,
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
    ],
};

impl GaussRule {
    /// Integrates `f` over `[a, b]`. The closure also receives the local
    /// coordinate `t in [0, 1]` of each point.
    #[inline]
    pub fn integrate<F: FnMut(f64, f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.points.iter().zip(self.weights) {
            let r = mid + half * x;
            acc += w * f(r, 0.5 * (1.0 + x));
        }
        acc * half
    }
}

/// `int_a^b r^s dr` evaluated without cancellation for nearby endpoints.
pub fn power_moment(s: f64, a: f64, b: f64) -> f64 {
    debug_assert!(0.0 <= a && a <= b);
    if a == b {
        return 0.0;
    }
    let e = s + 1.0;
    if a == 0.0 {
        debug_assert!(e > 0.0, "r^{s} is not integrable at the origin");
        return b.powf(e) / e;
    }
    let log_ratio = ((b - a) / a).ln_1p();
    if e == 0.0 {
        log_ratio
    } else {
        a.powf(e) * (e * log_ratio).exp_m1() / e
    }
}

/// Dyadic descent towards the origin stops at `TAIL_DEPTH * b`; the rest
/// is extrapolated geometrically from the last two pieces.
const TAIL_DEPTH: f64 = 1e-60;

/// `int_a^b g(r) dr` for integrands that may be singular (but integrable)
/// at `r = 0` and vary over several decades on `[a, b]`.
///
/// Intervals touching the origin are split dyadically towards it, and the
/// remainder below `1e-60 b` is summed as a geometric series, which is
/// exact for power singularities. Non-decaying pieces (a non-integrable
/// singularity) give `inf`. Intervals away from the origin are split
/// geometrically with endpoint ratio at most `2^(1/4)`. Each piece uses
/// the five-point rule.
pub fn integrate_radial<F: FnMut(f64) -> f64>(a: f64, b: f64, mut g: F) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    if a == 0.0 {
        let mut total = 0.0;
        let mut hi = b;
        let mut prev = f64::NAN;
        for level in 0.. {
            let lo = 0.5 * hi;
            let piece = geometric_pieces(lo, hi, &mut g);
            total += piece;
            if level >= 8 && piece.abs() <= 1e-17 * total.abs() {
                break;
            }
            if lo < TAIL_DEPTH * b {
                if prev == 0.0 || piece == 0.0 {
                    break;
                }
                let q = piece / prev;
                if !(q.abs() < 1.0) {
                    return f64::INFINITY;
                }
                total += piece * q / (1.0 - q);
                break;
            }
            prev = piece;
            hi = lo;
        }
        return total;
    }
    geometric_pieces(a, b, &mut g)
}

fn geometric_pieces<F: FnMut(f64) -> f64>(a: f64, b: f64, g: &mut F) -> f64 {
    let ratio = b / a;
    let pieces = ((4.0 * ratio.log2()).ceil() as usize).max(1);
    if pieces == 1 {
        return GAUSS5.integrate(a, b, |r, _| g(r));
    }
    let step = ratio.powf(1.0 / pieces as f64);
    let mut lo = a;
    let mut total = 0.0;
    for i in 0..pieces {
        let hi = if i + 1 == pieces { b } else { lo * step };
        total += GAUSS5.integrate(lo, hi, |r, _| g(r));
        lo = hi;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rules_are_exact_for_polynomials() {
        let i3 = GAUSS3.integrate(0.0, 2.0, |r, _| r.powi(5));
        assert!((i3 - 64.0 / 6.0).abs() < 1e-12);
        let i5 = GAUSS5.integrate(-1.0, 3.0, |r, _| r.powi(9));
        assert!((i5 - (3f64.powi(10) - 1.0) / 10.0).abs() < 1e-8);
    }

    #[test]
    fn moments() {
        assert!((power_moment(2.0, 0.0, 1.0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((power_moment(-0.5, 0.0, 4.0) - 4.0).abs() < 1e-14);
        assert!((power_moment(-1.0, 1.0, std::f64::consts::E) - 1.0).abs() < 1e-15);
        let b = 1.0 + 1e-9;
        let h = b - 1.0;
        let close = power_moment(1.5, 1.0, b);
        assert!((close - h * (1.0 + 0.75 * h)).abs() < 1e-15 * h);
    }

    #[test]
    fn singular_integrand() {
        // int_0^1 r^(-0.9) dr = 10
        let v = integrate_radial(0.0, 1.0, |r| r.powf(-0.9));
        assert!((v - 10.0).abs() < 1e-9, "{v}");
        let v = integrate_radial(0.0, 1.0, |r| r.powf(-0.99) * 2.0);
        assert!((v - 200.0).abs() < 1e-9, "{v}");
        assert_eq!(integrate_radial(0.0, 1.0, |r| r.powf(-1.1)), f64::INFINITY);
        let v = integrate_radial(1e-6, 1.0, |r| 1.0 / r);
        assert!((v - 6.0 * 10f64.ln()).abs() < 1e-9);
    }
}
