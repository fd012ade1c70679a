//! Cell-wise integration of piecewise linear fields, optionally restricted
//! to level sets.

use crate::radial::mesh::NodalField;
use crate::radial::problem::{Source, SourceTerm};
use crate::radial::quadrature::{integrate_radial, power_moment};
use crate::radial::quadrature::GAUSS5;
use crate::radial::solver::power_law_pieces;
use crate::radial::sphere_area;

/// Local coordinates in `[0, 1]` splitting a linear segment `v0 -> v1` at
/// every crossing of one of `levels`; always starts at 0 and ends at 1.
pub(crate) fn cut_points(v0: f64, v1: f64, levels: &[f64]) -> Vec<f64> {
    let mut ts = vec![0.0, 1.0];
    let dv = v1 - v0;
    if dv != 0.0 {
        for &c in levels {
            let t = (c - v0) / dv;
            if t > 0.0 && t < 1.0 {
                ts.push(t);
            }
        }
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts
}

/// Calls `visit(i, lo, hi, u_mid)` for the pieces of each cell between
/// crossings of `levels` by `field`.
pub(crate) fn for_each_piece(field: &NodalField, levels: &[f64], mut visit: impl FnMut(usize, f64, f64, f64)) {
    let mesh = field.mesh();
    let v = field.values();
    for i in 0..mesh.cells() {
        let (a, b) = mesh.cell(i);
        let ts = cut_points(v[i], v[i + 1], levels);
        for w in ts.windows(2) {
            let lo = a + (b - a) * w[0];
            let hi = if w[1] == 1.0 { b } else { a + (b - a) * w[1] };
            if hi > lo {
                visit(i, lo, hi, field.at_local(i, 0.5 * (w[0] + w[1])));
            }
        }
    }
}

/// `omega int g(r, u, u') r^(N-1) dr` over the pieces whose midpoint value
/// satisfies `keep`.
pub(crate) fn integrate_field_where(
    field: &NodalField,
    dim: u32,
    levels: &[f64],
    keep: impl Fn(f64) -> bool,
    g: impl Fn(f64, f64, f64) -> f64,
) -> f64 {
    let e = dim as i32 - 1;
    let mut total = 0.0;
    for_each_piece(field, levels, |i, lo, hi, mid| {
        if !keep(mid) {
            return;
        }
        let du = field.slope(i);
        let (a, b) = field.mesh().cell(i);
        let (u0, u1) = (field.values()[i], field.values()[i + 1]);
        total += GAUSS5.integrate(lo, hi, |r, _| {
            let t = (r - a) / (b - a);
            g(r, u0 + (u1 - u0) * t, du) * r.powi(e)
        });
    });
    sphere_area(dim) * total
}

/// `omega int g(r, u, u') r^(N-1) dr` over the whole mesh.
pub(crate) fn integrate_field(field: &NodalField, dim: u32, g: impl Fn(f64, f64, f64) -> f64) -> f64 {
    integrate_field_where(field, dim, &[], |_| true, g)
}

/// `omega int h(r) r^(N-1) dr` over `{ |u| >= k }` for data `h` that may
/// be singular at the origin.
pub(crate) fn integrate_data_where_at_least(field: &NodalField, dim: u32, k: f64, h: impl Fn(f64) -> f64) -> f64 {
    let e = dim as i32 - 1;
    let mut total = 0.0;
    for_each_piece(field, &[k, -k], |_, lo, hi, mid| {
        if mid.abs() >= k {
            total += integrate_radial(lo, hi, |r| h(r) * r.powi(e));
        }
    });
    sphere_area(dim) * total
}

/// N-dimensional measure of the pieces whose midpoint value satisfies
/// `keep`.
pub(crate) fn measure_where(field: &NodalField, dim: u32, levels: &[f64], keep: impl Fn(f64) -> bool) -> f64 {
    let n = dim as f64;
    let mut total = 0.0;
    for_each_piece(field, levels, |_, lo, hi, mid| {
        if keep(mid) {
            total += hi.powf(n) - lo.powf(n);
        }
    });
    sphere_area(dim) * total / n
}

/// `int_lo^hi f(r) (c0 + c1 r) r^(N-1) dr` (no angular factor); exact
/// for power-law sources.
pub(crate) fn affine_source_integral(dim: u32, term: SourceTerm<'_>, lo: f64, hi: f64, c0: f64, c1: f64) -> f64 {
    match term.source {
        Source::PowerLaw { gamma, amp } => {
            if *amp == 0.0 {
                return 0.0;
            }
            power_law_pieces(*gamma, *amp, term.level, dim as f64 - 1.0, lo, hi)
                .into_iter()
                .map(|(a, b, coef, s)| coef * (c0 * power_moment(s, a, b) + c1 * power_moment(s + 1.0, a, b)))
                .sum()
        }
        Source::Tabulated { .. } => {
            let e = dim as i32 - 1;
            integrate_radial(lo, hi, |r| term.eval(r) * (c0 + c1 * r) * r.powi(e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::mesh::RadialMesh;
    use std::f64::consts::PI;
    use std::sync::Arc;

    #[test]
    fn cuts() {
        assert_eq!(cut_points(0.0, 2.0, &[1.0, -1.0]), vec![0.0, 0.5, 1.0]);
        assert_eq!(cut_points(1.0, 1.0, &[1.0]), vec![0.0, 1.0]);
        assert_eq!(cut_points(2.0, -2.0, &[1.0, -1.0]), vec![0.0, 0.25, 0.75, 1.0]);
    }

    #[test]
    fn level_set_measure() {
        let mesh = Arc::new(RadialMesh::graded(0.0, 1.0, 10, 1.0, true).unwrap());
        let u = NodalField::from_fn(mesh, |r| 1.0 - r);
        // {1 - r > 0.5} = ball of radius 0.5
        let m = measure_where(&u, 3, &[0.5], |v| v > 0.5);
        assert!((m - 4.0 * PI / 3.0 * 0.125).abs() < 1e-14);
        let vol = integrate_field(&u, 3, |_, _, _| 1.0);
        assert!((vol - 4.0 * PI / 3.0).abs() < 1e-13);
    }
}
