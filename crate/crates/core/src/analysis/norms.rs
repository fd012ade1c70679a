//! Lebesgue and Sobolev-type norms of radial nodal fields, in the full
//! N-dimensional normalization.

use std::collections::BTreeMap;

use crate::analysis::cells::integrate_field;
use crate::error::{domain, Result};
use crate::radial::mesh::NodalField;
use crate::radial::sphere_area;

/// `omega int |u|^p r^(N-1) dr` (no root taken).
pub fn lebesgue_integral(field: &NodalField, p: f64, dim: u32) -> f64 {
    integrate_field(field, dim, |_, u, _| u.abs().powf(p))
}

/// `(omega int |u|^p r^(N-1) dr)^(1/p)`, `p >= 1`.
pub fn lebesgue_norm(field: &NodalField, p: f64, dim: u32) -> Result<f64> {
    if !(p >= 1.0) {
        return domain(format!("Lebesgue exponent must be at least 1, got {p}"));
    }
    Ok(lebesgue_integral(field, p, dim).powf(1.0 / p))
}

/// `omega int |u'| r^(N-1) dr`, exact for piecewise linear `u`.
pub fn w11_seminorm(field: &NodalField, dim: u32) -> f64 {
    let mesh = field.mesh();
    let n = dim as f64;
    let total: f64 = (0..mesh.cells())
        .map(|i| {
            let (a, b) = mesh.cell(i);
            field.slope(i).abs() * (b.powf(n) - a.powf(n)) / n
        })
        .sum();
    sphere_area(dim) * total
}

/// `omega int |u'|^q r^(N-1) dr`, exact for piecewise linear `u`.
pub fn gradient_power_integral(field: &NodalField, q: f64, dim: u32) -> f64 {
    let mesh = field.mesh();
    let n = dim as f64;
    let total: f64 = (0..mesh.cells())
        .map(|i| {
            let (a, b) = mesh.cell(i);
            let s = field.slope(i).abs();
            if s == 0.0 {
                0.0
            } else {
                s.powf(q) * (b.powf(n) - a.powf(n)) / n
            }
        })
        .sum();
    sphere_area(dim) * total
}

/// `omega int |u'|^2 (1+|u|)^(-s) r^(N-1) dr`, `s >= 0`.
pub fn weighted_gradient_energy(field: &NodalField, s: f64, dim: u32) -> Result<f64> {
    if !(s >= 0.0) {
        return domain(format!("energy weight exponent must be nonnegative, got {s}"));
    }
    Ok(integrate_field(field, dim, |_, u, du| du * du * (1.0 + u.abs()).powf(-s)))
}

/// Norms attached to every solve result.
pub fn standard_norms(u: &NodalField, dim: u32, theta: f64) -> BTreeMap<String, f64> {
    let n = dim as f64;
    let crit = n / (n - 1.0);
    let l1 = lebesgue_integral(u, 1.0, dim);
    let semi = w11_seminorm(u, dim);
    let energy = |s: f64| integrate_field(u, dim, |_, v, dv| dv * dv * (1.0 + v.abs()).powf(-s));
    let mut norms = BTreeMap::new();
    norms.insert("l1".to_string(), l1);
    norms.insert("w11_seminorm".to_string(), semi);
    norms.insert("w11".to_string(), l1 + semi);
    norms.insert("l_n_over_n_minus_1".to_string(), lebesgue_integral(u, crit, dim).powf(1.0 / crit));
    norms.insert("energy_n_over_n_minus_1".to_string(), energy(crit));
    norms.insert("energy_theta_plus_one".to_string(), energy(theta + 1.0));
    norms
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::mesh::RadialMesh;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn ball(cells: usize, grading: f64) -> Arc<RadialMesh> {
        Arc::new(RadialMesh::graded(0.0, 1.0, cells, grading, true).unwrap())
    }

    #[test]
    fn unit_field_volume() {
        let one = NodalField::from_fn(ball(16, 3.0), |_| 1.0);
        for p in [1.0, 1.5, 2.0] {
            let v = lebesgue_norm(&one, p, 3).unwrap();
            assert!((v - (4.0 * PI / 3.0).powf(1.0 / p)).abs() < 1e-12);
        }
        assert!(lebesgue_norm(&one, 0.5, 3).is_err());
        assert_eq!(w11_seminorm(&one, 3), 0.0);
    }

    #[test]
    fn linear_profile() {
        let u = NodalField::from_fn(ball(8, 1.0), |r| 1.0 - r);
        assert!((w11_seminorm(&u, 3) - 4.0 * PI / 3.0).abs() < 1e-13);
        assert!((weighted_gradient_energy(&u, 0.0, 3).unwrap() - 4.0 * PI / 3.0).abs() < 1e-13);
        assert!(weighted_gradient_energy(&u, -1.0, 3).is_err());
    }

    #[test]
    fn singular_profile_l1_converges() {
        // u = r^-2 - 1 on the ball: omega int (1 - r^2) dr = 4 pi 2/3
        let exact = 4.0 * PI * 2.0 / 3.0;
        let mut errs = Vec::new();
        for m in [256, 1024, 4096] {
            let mesh = ball(m, 3.0);
            let mut u = NodalField::from_fn(mesh, |r| r.powi(-2) - 1.0).into_values();
            u[0] = u[1]; // r = 0 node: any finite value
            let mesh = ball(m, 3.0);
            let u = NodalField::new(mesh, u).unwrap();
            errs.push((lebesgue_integral(&u, 1.0, 3) - exact).abs());
        }
        assert!(errs[2] < errs[1] && errs[1] < errs[0], "{errs:?}");
        assert!(errs[2] < 1e-2 * exact);
    }

    #[test]
    fn zero_field() {
        let z = NodalField::zeros(ball(8, 2.0));
        let norms = standard_norms(&z, 3, 0.5);
        assert!(norms.values().all(|v| *v == 0.0));
        assert_eq!(norms.len(), 6);
    }
}
