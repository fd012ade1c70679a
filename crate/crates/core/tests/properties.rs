//! Property tests of the scalar transforms and the regime classifier.

use degenlab::regimes::{classify, critical_m_values, q_exponent, ClassPoint, Region};
use degenlab::transform::{power_test, psi, psi_derivative, psi_inverse, truncate};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + a.abs().max(b.abs()))
}

/// Order of the regions along increasing m at fixed theta in (0, 1).
fn rank(region: Region) -> Option<u8> {
    match region {
        Region::D => Some(0),
        Region::CurveThm1 => Some(1),
        Region::C => Some(2),
        Region::B => Some(3),
        Region::A => Some(4),
        _ => None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 512, ..ProptestConfig::default() })]

    #[test]
    fn psi_roundtrip_and_oddness(theta in 0.0f64..=1.0, u in -1e6f64..1e6) {
        let w = psi(theta, u);
        prop_assert!(rel(psi_inverse(theta, w), u) < 1e-11);
        prop_assert_eq!(psi(theta, -u), -w);
        prop_assert!(w.abs() <= u.abs() * (1.0 + 1e-15));
    }

    #[test]
    fn psi_is_increasing_with_the_stated_derivative(theta in 0.0f64..=1.0, u in -50.0f64..50.0) {
        let h = 1e-5;
        prop_assert!(psi(theta, u + h) > psi(theta, u));
        let fd = (psi(theta, u + h) - psi(theta, u - h)) / (2.0 * h);
        prop_assert!(rel(fd, psi_derivative(theta, u)) < 1e-6);
    }

    #[test]
    fn truncation_clamps(k in 0.0f64..100.0, s in -1e3f64..1e3) {
        let t = truncate(k, s).unwrap();
        prop_assert!(t.abs() <= k);
        prop_assert_eq!(truncate(k, t).unwrap(), t);
        if s.abs() <= k { prop_assert_eq!(t, s); }
    }

    #[test]
    fn power_test_is_odd_and_monotone(p in 0.01f64..3.0, u in -1e3f64..1e3, du in 1e-6f64..1.0) {
        let a = power_test(p, u).unwrap();
        prop_assert_eq!(power_test(p, -u).unwrap(), -a);
        prop_assert!(power_test(p, u + du).unwrap() > a);
    }

    #[test]
    fn critical_values_are_ordered(n in 3u32..12, theta in 0.0f64..=1.0) {
        let c = critical_m_values(n, theta).unwrap();
        // the lower curve enters m >= 1 at theta = 1/(N-1)
        let cross = 1.0 / (n as f64 - 1.0);
        if (theta - cross).abs() > 1e-9 {
            prop_assert_eq!(c.m_lower > 1.0, theta > cross);
        }
        prop_assert!(c.m_lower <= c.m_upper + 1e-12);
        prop_assert!(c.m_upper <= c.m_linfty + 1e-12);
    }

    #[test]
    fn q_runs_from_one_to_two_between_the_curves(n in 3u32..12, theta in 0.01f64..0.99, t in 0.0f64..=1.0) {
        let c = critical_m_values(n, theta).unwrap();
        let m = c.m_lower + t * (c.m_upper - c.m_lower);
        let q = q_exponent(n, theta, m).unwrap();
        prop_assert!((1.0 - 1e-9..=2.0 + 1e-9).contains(&q));
        if t == 0.0 { prop_assert!((q - 1.0).abs() < 1e-9); }
        if t == 1.0 { prop_assert!((q - 2.0).abs() < 1e-9); }
    }

    #[test]
    fn regions_advance_with_m(n in 3u32..8, theta in 0.01f64..0.99, m1 in 1.001f64..6.0, m2 in 1.001f64..6.0) {
        let (lo, hi) = if m1 <= m2 { (m1, m2) } else { (m2, m1) };
        let a = classify(&ClassPoint::new(n, theta, lo, false)).unwrap().region;
        let b = classify(&ClassPoint::new(n, theta, hi, false)).unwrap().region;
        if let (Some(ra), Some(rb)) = (rank(a), rank(b)) {
            prop_assert!(ra <= rb, "{:?} at m={} after {:?} at m={}", a, lo, b, hi);
        }
    }

    #[test]
    fn every_admissible_point_is_classified(n in 3u32..12, theta in 0.0f64..=1.0, m in 1.0f64..10.0) {
        prop_assert!(classify(&ClassPoint::new(n, theta, m, false)).is_ok());
    }
}
