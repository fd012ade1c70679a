//! Tridiagonal elimination (Thomas algorithm).

use crate::error::{Error, Result};

/// Solves `A x = rhs` for tridiagonal `A` with sub-diagonal `lower`,
/// diagonal `diag` and super-diagonal `upper`.
///
/// No pivoting: the systems assembled here are symmetric positive definite
/// M-matrices, for which elimination is stable. A vanishing pivot is
/// reported rather than propagated as infinities.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if rhs.len() != n || lower.len() + 1 != n.max(1) || upper.len() + 1 != n.max(1) {
        return Err(Error::Input(format!(
            "tridiagonal shape mismatch: diag {n}, lower {}, upper {}, rhs {}",
            lower.len(),
            upper.len(),
            rhs.len()
        )));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = diag[0];
    check_pivot(pivot, 0)?;
    if n > 1 {
        c[0] = upper[0] / pivot;
    }
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - lower[i - 1] * c[i - 1];
        check_pivot(pivot, i)?;
        if i + 1 < n {
            c[i] = upper[i] / pivot;
        }
        d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

fn check_pivot(p: f64, i: usize) -> Result<()> {
    if p.is_finite() && p != 0.0 {
        Ok(())
    } else {
        Err(Error::Assembly(format!("zero or non-finite pivot {p} at row {i}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_laplacian() {
        let n = 6;
        let diag = vec![2.0; n];
        let off = vec![-1.0; n - 1];
        let x: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let mut b = vec![0.0; n];
        for i in 0..n {
            b[i] = 2.0 * x[i] - if i > 0 { x[i - 1] } else { 0.0 } - if i + 1 < n { x[i + 1] } else { 0.0 };
        }
        let y = solve_tridiagonal(&off, &diag, &off, &b).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn singular_and_shape_errors() {
        assert!(solve_tridiagonal(&[1.0], &[1.0, 1.0], &[1.0], &[1.0, 1.0]).is_err());
        assert!(solve_tridiagonal(&[], &[1.0, 1.0], &[1.0], &[1.0, 1.0]).is_err());
        assert_eq!(solve_tridiagonal(&[], &[4.0], &[], &[2.0]).unwrap(), vec![0.5]);
    }
}
