//! The ten acceptance criteria. Each test prints one `criterion N: PASS|FAIL`
//! line with the measured quantities before asserting.

use std::sync::Arc;
use std::time::{Duration, Instant};

use degenlab::analysis::estimates::{check_estimates, EstimateId, EstimateInput, EstimateParams};
use degenlab::analysis::estimates::limit_bound;
use degenlab::analysis::norms::{lebesgue_integral, w11_seminorm};
use degenlab::analysis::exponents::{fit_decay_slope, gradient_integrability_threshold};
use degenlab::radial::solver::cell_fluxes;
use degenlab::radial::{
    build_mesh, oracle_solve, picard_solve, solve_linear_w, truncated_sequence, Coefficient, DomainMode,
    ProblemSpec, RadialMesh, SolveConfig, Source,
};
use degenlab::regimes::{critical_m_values, phase_diagram_grid, q_exponent, Region};
use degenlab::transform::{psi, psi_derivative, psi_inverse, truncate, power_test, log_test, energy_variable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: u32, ok: bool, elapsed: Duration, limit: Duration, detail: String) {
    let within = elapsed <= limit;
    println!(
        "criterion {id}: {} [{:.3}s / {:.0}s] {detail}",
        if ok && within { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs_f64()
    );
    assert!(ok, "criterion {id} failed: {detail}");
    assert!(within, "criterion {id} exceeded its runtime budget");
}

fn sci(xs: &[f64]) -> Vec<String> {
    xs.iter().map(|x| format!("{x:.3e}")).collect()
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn closed_form_annulus() -> ProblemSpec {
    ProblemSpec::new(3, 0.75, Coefficient::constant(1.0), Source::power_law(2.5, 1.0))
        .with_exact_annulus(0.01)
        .unwrap()
}

fn mesh(spec: &ProblemSpec, cells: usize, grading: f64) -> Arc<RadialMesh> {
    Arc::new(build_mesh(spec, cells, grading).unwrap())
}

fn weighted_l2(a: &[f64], b: &[f64], nodes: &[f64]) -> f64 {
    // lumped r^2-weighted relative L2 difference
    let (mut d, mut n) = (0.0, 0.0);
    for j in 0..nodes.len() {
        let lo = if j > 0 { 0.5 * (nodes[j - 1] + nodes[j]) } else { nodes[0] };
        let hi = if j + 1 < nodes.len() { 0.5 * (nodes[j] + nodes[j + 1]) } else { nodes[j] };
        let w = hi.powi(3) - lo.powi(3);
        d += w * (a[j] - b[j]).powi(2);
        n += w * b[j].powi(2);
    }
    (d / n).sqrt()
}

#[test]
fn criterion_01_regime_boundaries() {
    let t = Instant::now();
    let c = critical_m_values(3, 0.75).unwrap();
    let mut ok = (c.m_lower - 1.2).abs() < 1e-12 && (c.m_upper - 24.0 / 17.0).abs() < 1e-12 && (c.m_linfty - 1.5).abs() < 1e-12;
    let mut worst = 0.0f64;
    for n in [3u32, 4, 5, 10] {
        for i in 0..100 {
            let theta = i as f64 / 100.0;
            let c = critical_m_values(n, theta).unwrap();
            let q_lo = q_exponent(n, theta, c.m_lower).unwrap();
            let q_hi = q_exponent(n, theta, c.m_upper).unwrap();
            worst = worst.max((q_lo - 1.0).abs()).max((q_hi - 2.0).abs());
        }
    }
    ok &= worst < 1e-12;
    report(1, ok, t.elapsed(), secs(1), format!("m = ({}, {}, {}), max |q - target| = {worst:.2e}", c.m_lower, c.m_upper, c.m_linfty));
}

#[test]
fn criterion_02_closed_form_oracle() {
    let t = Instant::now();
    let spec = closed_form_annulus();
    let levels = [256usize, 512, 1024, 2048, 4096];
    let errors: Vec<f64> = levels
        .iter()
        .map(|&m| {
            let msh = mesh(&spec, m, 1.0);
            let res = oracle_solve(&spec, &msh).unwrap();
            msh.nodes()
                .iter()
                .zip(res.w.values())
                .map(|(&r, &w)| {
                    let exact = spec.exact_w(r).unwrap();
                    if exact == 0.0 { (w - exact).abs() } else { ((w - exact) / exact).abs() }
                })
                .filter(|e| e.is_finite())
                .fold(0.0, f64::max)
        })
        .collect();
    let orders: Vec<f64> = errors.windows(2).map(|e| (e[0] / e[1]).log2()).collect();
    let min_order = orders.iter().copied().fold(f64::INFINITY, f64::min);
    let ok = errors[4] < 1e-3 && min_order >= 1.9;
    report(2, ok, t.elapsed(), secs(10), format!("max rel error {:?}, orders {orders:.3?}", sci(&errors)));
}

#[test]
fn criterion_03_picard_oracle_agreement() {
    let t = Instant::now();
    let spec = closed_form_annulus();
    let cfg = SolveConfig::default();
    let mut diffs = Vec::new();
    let mut iters = Vec::new();
    let mut converged = true;
    for m in [256usize, 512, 1024, 2048, 4096] {
        let msh = mesh(&spec, m, 1.0);
        let o = oracle_solve(&spec, &msh).unwrap();
        let p = picard_solve(&spec, &msh, &cfg).unwrap();
        converged &= p.converged() && p.iterations <= 200;
        iters.push(p.iterations);
        diffs.push(weighted_l2(p.w.values(), o.w.values(), msh.nodes()));
    }
    let rates: Vec<f64> = diffs.windows(2).map(|d| (d[0] / d[1]).log2()).collect();
    let ok = converged && diffs[4] < 5e-3 && rates.iter().all(|r| *r >= 1.0);
    report(3, ok, t.elapsed(), secs(30), format!("rel L2 diff {:?}, rates {rates:.3?}, iterations {iters:?}", sci(&diffs)));
}

/// Sequence W^{1,1} norms stay below the refinement-converged norm of the
/// untruncated solution.
fn w11_bounded(spec: &ProblemSpec, msh: &RadialMesh, norms: &[f64]) -> (bool, f64) {
    let dim = spec.dim;
    let limit = limit_bound(spec, msh, &|u| lebesgue_integral(u, 1.0, dim) + w11_seminorm(u, dim)).unwrap();
    let ok = limit.converged && norms.iter().all(|&v| v.is_finite() && v <= limit.bound * (1.0 + 1e-6));
    (ok, limit.bound)
}

fn estimate_failures(spec: &ProblemSpec, members: &[degenlab::radial::SolveResult], ids: &[EstimateId], params: &EstimateParams) -> (usize, usize, Vec<String>) {
    let rows = check_estimates(ids, EstimateInput { spec, members }, params).unwrap();
    let failed: Vec<String> = rows.iter().filter(|r| !r.passed()).map(|r| format!("{}(k={:?},n={:?})", r.id, r.k, r.n)).collect();
    (rows.len(), failed.len(), failed)
}

#[test]
fn criterion_04_borderline_curve_study() {
    let t = Instant::now();
    let spec = ProblemSpec::new(3, 0.75, Coefficient::constant(1.0), Source::power_law(2.4, 1.0));
    let fine = mesh(&spec, 4096, 3.0);
    let oracle = oracle_solve(&spec, &fine).unwrap();
    let fit = fit_decay_slope(&oracle.u, (1e-6, 1e-3)).unwrap().with_prediction(-1.6);
    let slope_ok = fit.relative_gap.unwrap() < 0.02;

    let msh = mesh(&spec, 2048, 3.0);
    let schedule: Vec<f64> = (0..=10).map(|j| (1u64 << j) as f64).collect();
    let seq = truncated_sequence(&spec, &msh, &SolveConfig::default(), &schedule).unwrap();
    let (bounded, bound) = w11_bounded(&spec, &msh, &seq.w11_norms);
    let monotone = seq.w11_differences.windows(2).all(|d| d[1] < d[0]);

    use EstimateId::*;
    let ids = [Tk1, Inizio, R, L, One, Iniziok, OneK, Malaga, Stima];
    let params = EstimateParams { k_list: vec![1.0, 2.0, 4.0, 8.0], ..Default::default() };
    let (rows, nfail, failed) = estimate_failures(&spec, &seq.members, &ids, &params);
    let ok = slope_ok && seq.all_converged && bounded && monotone && nfail == 0;
    report(
        4,
        ok,
        t.elapsed(),
        secs(120),
        format!(
            "slope {:.4} (gap {:.2e}), W11 norms bounded={bounded} (limit ~{bound:.4}), differences monotone={monotone} {:?}, converged={}, estimate rows {rows}, failed {nfail} {:?}",
            fit.fitted_slope,
            fit.relative_gap.unwrap(),
            sci(&seq.w11_differences),
            seq.all_converged,
            &failed[..failed.len().min(8)]
        ),
    );
}

#[test]
fn criterion_05_gradient_threshold() {
    let t = Instant::now();
    let spec = ProblemSpec::new(3, 0.75, Coefficient::constant(1.0), Source::power_law(2.4, 1.0));
    let est = gradient_integrability_threshold(&spec, (1.0, 1.5), &[256, 512, 1024, 2048, 4096]).unwrap();
    let target = 15.0 / 13.0;
    let q = est.q_star.unwrap_or(f64::NAN);
    let gap = ((q - target) / target).abs();
    let ok = est.monotone && !est.no_blow_up && gap < 0.05;
    report(5, ok, t.elapsed(), secs(120), format!("q* = {q:.5} vs {target:.5} (gap {gap:.2e}), bracket {:?}", est.interval));
}

#[test]
fn criterion_06_llogl_point_study() {
    let t = Instant::now();
    let spec = ProblemSpec::new(3, 0.5, Coefficient::constant(1.0), Source::power_law(2.9, 1.0));
    let fine = mesh(&spec, 4096, 3.0);
    let oracle = oracle_solve(&spec, &fine).unwrap();
    let fit = fit_decay_slope(&oracle.u, (1e-6, 1e-3)).unwrap().with_prediction(-1.8);
    let slope_ok = fit.relative_gap.unwrap() < 0.02;

    let msh = mesh(&spec, 2048, 3.0);
    let schedule: Vec<f64> = (0..=10).map(|j| (1u64 << j) as f64).collect();
    let seq = truncated_sequence(&spec, &msh, &SolveConfig::default(), &schedule).unwrap();
    let (bounded, _) = w11_bounded(&spec, &msh, &seq.w11_norms);

    use EstimateId::*;
    let params = EstimateParams { k_list: vec![1.0, 2.0, 4.0, 8.0], rho: Some(0.25), ..Default::default() };
    let (rows, nfail, failed) = estimate_failures(&spec, &seq.members, &[Llogl, Camino0, Camino, Stima], &params);
    let ok = slope_ok && seq.all_converged && bounded && nfail == 0;
    report(
        6,
        ok,
        t.elapsed(),
        secs(120),
        format!(
            "slope {:.4} (gap {:.2e}), W11 bounded={bounded}, converged={}, estimate rows {rows}, failed {nfail} {:?}",
            fit.fitted_slope,
            fit.relative_gap.unwrap(),
            seq.all_converged,
            &failed[..failed.len().min(8)]
        ),
    );
}

#[test]
fn criterion_07_bar_inequality() {
    let t = Instant::now();
    let spec = ProblemSpec::new(3, 0.5, Coefficient::constant(1.0), Source::zero());
    let params = EstimateParams { seed: 0, samples: 100_000, ..Default::default() };
    let rows = check_estimates(&[EstimateId::Bar], EstimateInput { spec: &spec, members: &[] }, &params).unwrap();
    let ok = rows.len() == 1 && rows[0].passed();
    report(7, ok, t.elapsed(), secs(1), format!("{} (max lhs/rhs {:.4})", rows[0].note.clone().unwrap_or_default(), rows[0].lhs));
}

#[test]
fn criterion_08_transform_suite() {
    let t = Instant::now();
    let thetas = [0.0, 0.25, 0.5, 0.75, 1.0];
    let grid: Vec<f64> = (0..=120).map(|i| 10f64.powf(-6.0 + 12.0 * i as f64 / 120.0)).collect();
    let mut round_trip = 0.0f64;
    let mut odd = true;
    for &theta in &thetas {
        for &a in &grid {
            for u in [a, -a] {
                round_trip = round_trip.max((psi_inverse(theta, psi(theta, u)) - u).abs() / (1.0 + u.abs()));
            }
            odd &= psi(theta, -a) == -psi(theta, a) && psi_inverse(theta, -a) == -psi_inverse(theta, a);
            odd &= truncate(2.0, -a).unwrap() == -truncate(2.0, a).unwrap();
            odd &= power_test(0.25, -a).unwrap() == -power_test(0.25, a).unwrap();
            odd &= log_test(1.0, -a).unwrap() == -log_test(1.0, a).unwrap();
            odd &= energy_variable(0.25, -a).unwrap() == -energy_variable(0.25, a).unwrap();
        }
    }
    // Richardson-extrapolated central differences against (1+|u|)^-theta
    let mut deriv = 0.0f64;
    for &theta in &thetas {
        for &u in &[-7.5, -0.3, 0.4, 2.0, 40.0] {
            let d = |h: f64| (psi(theta, u + h) - psi(theta, u - h)) / (2.0 * h);
            let rich = (4.0 * d(1e-3) - d(2e-3)) / 3.0;
            deriv = deriv.max((rich - psi_derivative(theta, u)).abs() / psi_derivative(theta, u));
        }
    }
    let mut cont = 0.0f64;
    for &u in &[0.5f64, 1.0, 10.0, 1e3] {
        let lim = u.ln_1p();
        cont = cont.max((psi(1.0 - 1e-8, u) - lim).abs() / lim);
    }
    let ok = round_trip <= 1e-10 && odd && deriv < 1e-8 && cont < 1e-6;
    report(8, ok, t.elapsed(), secs(1), format!("round trip {round_trip:.2e}, odd={odd}, derivative {deriv:.2e}, theta->1 {cont:.2e}"));
}

#[test]
fn criterion_09_maximum_principle_and_flux() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut min_u = f64::INFINITY;
    let mut flux_spread = 0.0f64;
    let mut converged = true;
    for _ in 0..20 {
        let dim = rng.gen_range(3u32..=6);
        let theta = rng.gen_range(0.0..=1.0);
        let coefficient = if rng.gen_bool(0.5) {
            Coefficient::constant(rng.gen_range(0.5..3.0))
        } else {
            let base = rng.gen_range(1.0..3.0);
            Coefficient::Sinusoidal { base, amplitude: rng.gen_range(0.0..0.9) * base, frequency: rng.gen_range(0.5..10.0) }
        };
        let cells = rng.gen_range(16usize..=256);
        let grading = rng.gen_range(1.0..3.0);
        let r_min = rng.gen_range(0.01..0.5);
        let ball = rng.gen_bool(0.5);
        let gamma = rng.gen_range(-1.0..(dim as f64 - 0.2));
        let amp = rng.gen_range(0.0..5.0);
        let inner = rng.gen_range(0.0..3.0);

        let mut spec = ProblemSpec::new(dim, theta, coefficient.clone(), Source::power_law(gamma, amp));
        if !ball {
            spec = spec.with_mode(DomainMode::Annulus { r_min, inner_value: inner });
        }
        let msh = mesh(&spec, cells, grading);
        let o = oracle_solve(&spec, &msh).unwrap();
        let p = picard_solve(&spec, &msh, &SolveConfig::default()).unwrap();
        converged &= p.converged();
        for v in o.u.values().iter().chain(p.u.values()) {
            min_u = min_u.min(*v);
        }

        let zero = ProblemSpec::new(dim, theta, coefficient, Source::zero())
            .with_mode(DomainMode::Annulus { r_min, inner_value: inner.max(0.1) });
        let msh = mesh(&zero, cells, grading);
        let w = solve_linear_w(&zero, &msh).unwrap();
        let flux = cell_fluxes(&zero, &w).unwrap();
        let scale = flux.iter().fold(0.0f64, |a, f| a.max(f.abs()));
        let spread = flux.iter().map(|f| (f - flux[0]).abs()).fold(0.0, f64::max) / scale;
        flux_spread = flux_spread.max(spread);
    }
    let ok = min_u >= 0.0 && flux_spread <= 1e-10 && converged;
    report(9, ok, t.elapsed(), secs(10), format!("min nodal u {min_u:.3e}, max relative flux spread {flux_spread:.2e}, picard converged={converged}"));
}

#[test]
fn criterion_10_phase_diagram() {
    let t = Instant::now();
    let cells = phase_diagram_grid(3, 200, 1, 2, 200).unwrap();
    let row: Vec<_> = cells.iter().filter(|c| c.theta == 0.75).collect();
    let mut seq: Vec<Region> = Vec::new();
    for c in &row {
        if seq.last() != Some(&c.region) {
            seq.push(c.region);
        }
    }
    let uncovered: Vec<f64> = row.iter().filter(|c| c.region == Region::Uncovered).map(|c| c.m).collect();
    let no_c_below = cells.iter().filter(|c| c.theta < 0.5).all(|c| c.region != Region::C);
    // the line m = N/2 itself is the one uncovered sample of the row
    let expected = [Region::D, Region::CurveThm1, Region::C, Region::B, Region::Uncovered, Region::A];
    let core: Vec<Region> = seq.iter().copied().filter(|r| *r != Region::Uncovered).collect();
    let ok = seq == expected
        && uncovered == [1.5]
        && core == [Region::D, Region::CurveThm1, Region::C, Region::B, Region::A]
        && no_c_below
        && cells.len() == 201 * 201;
    report(10, ok, t.elapsed(), secs(5), format!("theta = 0.75 row: {seq:?}, uncovered at m = {uncovered:?}, no C below 1/2 = {no_c_below}"));
}
