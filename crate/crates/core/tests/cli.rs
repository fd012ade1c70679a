//! End-to-end runs of the `degenlab` binary.

use std::process::{Command, Output};

fn degenlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_degenlab")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("valid json on stdout")
}

#[test]
fn classify_examples() {
    let out = degenlab(&["classify", "--N", "3", "--theta", "0.75", "--m", "1.2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["region"], "CurveThm1");
    assert_eq!(v["solution_space"][0]["label"], "W^{1,1}");

    let v = json(&degenlab(&["classify", "--N", "3", "--theta", "0.75", "--m", "2"]));
    assert_eq!(v["region"], "A");
    let v = json(&degenlab(&["classify", "--N", "3", "--theta", "0.2", "--m", "1.1"]));
    assert_eq!(v["region"], "Uncovered");
}

#[test]
fn invalid_input_exits_2() {
    for args in [
        &["classify", "--theta", "1.5", "--m", "2"][..],
        &["classify", "--theta", "0.5"],
        &["solve", "--mode", "torus"],
        &["solve", "--M", "4"],
        &["estimates", "--ids", ""],
        &["estimates", "--ids", "NOPE"],
        &["phase-diagram", "--grid", "10"],
        &["solve", "--unknown-flag"],
    ] {
        let out = degenlab(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?} wrote to stdout");
    }
}

#[test]
fn solve_annulus_matches_closed_form() {
    let out = degenlab(&["solve", "--gamma", "2.5", "--theta", "0.75", "--mode", "annulus", "--rmin", "0.1", "--M", "256"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,u,w,flux"));
    let mut worst = 0.0f64;
    for line in lines {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let exact = cols[0].powi(-2) - 1.0;
        worst = worst.max((cols[1] - exact).abs() / (1.0 + exact));
    }
    assert!(worst < 1e-3, "relative error {worst}");
}

#[test]
fn zero_source_gives_zero_field() {
    let out = degenlab(&["solve", "--amp", "0", "--M", "32", "--method", "picard"]);
    assert_eq!(out.status.code(), Some(0));
    for line in stdout(&out).lines().skip(1) {
        let u: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(u, 0.0);
    }
}

#[test]
fn non_convergence_exits_3_with_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = degenlab(&[
        "solve", "--method", "picard", "--max-iter", "1", "--M", "64", "--report", report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stdout(&out).lines().count(), 66);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(v["status"], "max_iterations");
    assert_eq!(v["iterations"], 1);
}

#[test]
fn strict_estimates_exit_4_on_explicit_failure() {
    // a nonzero inner datum violates the homogeneous boundary condition the
    // energy estimate relies on
    let args = ["estimates", "--mode", "annulus", "--rmin", "0.5", "--M", "64", "--schedule", "1,2,4", "--ids", "TK1"];
    assert_eq!(degenlab(&args).status.code(), Some(0));
    let mut strict = args.to_vec();
    strict.push("--strict");
    let out = degenlab(&strict);
    assert_eq!(out.status.code(), Some(4));
    assert!(stdout(&out).starts_with("estimate,k,p,rho,n,lhs,rhs,allowance,passed\n"));
}

#[test]
fn estimates_on_the_curve_study_pass() {
    let out = degenlab(&["estimates", "--theta", "0.75", "--gamma", "2.4", "--M", "512", "--ids", "TK1,R,L,ONE", "--strict"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.ends_with(",true")), "{text}");
}

#[test]
fn bar_inequality_has_no_violations() {
    let out = degenlab(&["estimates", "--ids", "BAR", "--seed", "0", "--M", "64", "--schedule", "1,2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v.as_array().unwrap().iter().all(|r| r["verdict"] == "passed"), "{v}");
}

#[test]
fn exponents_study() {
    let v = json(&degenlab(&["exponents", "--theta", "0.75", "--gamma", "2.4"]));
    let fitted = v["fitted"].as_f64().unwrap();
    assert!((fitted + 1.6).abs() < 0.032, "{fitted}");
    let q = v["gradient_threshold"]["q_star"].as_f64().unwrap();
    assert!((q - 15.0 / 13.0).abs() < 0.05 * 15.0 / 13.0, "{q}");

    let v = json(&degenlab(&["exponents", "--gamma", "1", "--M", "1024"]));
    assert_eq!(v["no_blow_up"], true);
    assert_eq!(v["gradient_threshold"]["no_blow_up"], true);
}

#[test]
fn phase_diagram_csv() {
    let out = degenlab(&["phase-diagram", "--N", "3", "--grid", "4,4", "--m-min", "1", "--m-max", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("theta,m,region"));
    assert_eq!(text.lines().count(), 1 + 5 * 5);
    assert!(!text.contains('\r'));
}

#[test]
fn output_is_deterministic_and_out_path_matches_stdout() {
    let args = ["sequence", "--M", "128", "--schedule", "1,2,4,8"];
    let a = degenlab(&args);
    let b = degenlab(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("seq.csv");
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    let c = degenlab(&with_out);
    assert!(c.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), a.stdout);

    let mut dash = args.to_vec();
    dash.extend(["--out", "-"]);
    assert_eq!(degenlab(&dash).stdout, a.stdout);
}

#[test]
fn config_file_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# sweep point\ntheta = 0.5\nm = 1.1\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    // N=3, theta=1/2: m_lower = 1, m_upper = 6/5
    assert_eq!(json(&degenlab(&["classify", "--config", cfg]))["region"], "C");
    // the flag wins over the file
    assert_eq!(json(&degenlab(&["classify", "--config", cfg, "--theta", "0.75"]))["region"], "D");

    std::fs::write(dir.path().join("bad.cfg"), "colour=blue\n").unwrap();
    let bad = dir.path().join("bad.cfg");
    assert_eq!(degenlab(&["classify", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn worker_count_does_not_change_output() {
    let args = ["sequence", "--M", "128", "--schedule", "1,2,4,8,16"];
    let run = |workers: &str| {
        Command::new(env!("CARGO_BIN_EXE_degenlab")).args(args).env("DEGENLAB_WORKERS", workers).output().unwrap()
    };
    let one = run("1");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, run("4").stdout);
    assert_eq!(run("zero").status.code(), Some(2));
}

#[test]
fn help_documents_defaults() {
    let out = degenlab(&["solve", "--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for needle in ["--N", "--theta", "--gamma", "--method", "--out", "--config", "[default: 0.75]"] {
        assert!(text.contains(needle), "missing {needle}");
    }
}
