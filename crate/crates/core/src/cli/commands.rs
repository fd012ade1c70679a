use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::sync::Arc;

use serde::Serialize;

use super::args::*;
use super::config::{pair, ConfigFile, List};
use crate::analysis::estimates::{check_estimates, parse_ids, write_ledger_csv, EstimateId, EstimateInput, EstimateParams};
use crate::analysis::exponents::{
    fit_decay_slope, gradient_integrability_threshold_with, predicted_decay_slope, ExponentStudy, ThresholdConfig,
};
use crate::error::{Error, Result};
use crate::format::fmt_real;
use crate::radial::export::{write_report_json, write_solution_csv, SolveReport};
use crate::radial::sequence::default_schedule;
use crate::radial::{
    build_mesh, oracle_solve, picard_solve, truncated_sequence, Coefficient, DomainMode, ProblemSpec, RadialMesh,
    SolveConfig, Source,
};
use crate::regimes::{classify, phase_diagram_grid, write_phase_csv, ClassPoint, Param};

/// How a command finished when it did not fail outright.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// Output was written, but some solve did not converge.
    NotConverged,
    /// `--strict` and an explicit estimate failed.
    StrictFailure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

fn load_config(output: &OutputArgs) -> Result<ConfigFile> {
    match &output.config {
        Some(path) => ConfigFile::load(path),
        None => Ok(ConfigFile::default()),
    }
}

fn format(output: &OutputArgs, cfg: &ConfigFile, default: Format) -> Result<Format> {
    match cfg.resolve_opt(output.format.clone(), "format")?.as_deref() {
        None => Ok(default),
        Some("csv") => Ok(Format::Csv),
        Some("json") => Ok(Format::Json),
        Some(other) => Err(Error::Input(format!("unknown format `{other}` (csv, json)"))),
    }
}

/// Opens `path`, `-` meaning standard output, runs `body` and flushes.
fn write_to(path: &str, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    if path == "-" {
        let stdout = io::stdout();
        let mut w = BufWriter::new(stdout.lock());
        body(&mut w)?;
        w.flush()?;
    } else {
        let file = File::create(path).map_err(|e| Error::Input(format!("cannot create {path}: {e}")))?;
        let mut w = BufWriter::new(file);
        body(&mut w)?;
        w.flush()?;
    }
    Ok(())
}

fn out_path(output: &OutputArgs, cfg: &ConfigFile) -> Result<String> {
    cfg.resolve(output.out.clone(), "out", "-".to_string())
}

fn write_json<T: Serialize + ?Sized>(w: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)?;
    Ok(())
}

fn parse_coefficient(s: &str) -> Result<Coefficient> {
    let bad = || Error::Input(format!("cannot parse coefficient `{s}` (constant or sin:BASE,AMPLITUDE,FREQUENCY)"));
    if let Some(rest) = s.strip_prefix("sin:") {
        let List(v) = rest.parse::<List<f64>>().map_err(|_| bad())?;
        return match v.as_slice() {
            &[base, amplitude, frequency] => Ok(Coefficient::Sinusoidal { base, amplitude, frequency }),
            _ => Err(bad()),
        };
    }
    s.trim().parse::<f64>().map(Coefficient::constant).map_err(|_| bad())
}

/// Problem and mesh from the problem flags; `default_cells` differs per command.
fn build_problem(a: &SpecArgs, cfg: &ConfigFile, default_cells: usize) -> Result<(ProblemSpec, Arc<RadialMesh>)> {
    let dim = cfg.resolve(a.dim, "N", 3u32)?;
    let theta = cfg.resolve(a.theta, "theta", 0.75)?;
    let gamma = cfg.resolve(a.gamma, "gamma", 2.4)?;
    let amp = cfg.resolve(a.amp, "amp", 1.0)?;
    let coef = parse_coefficient(&cfg.resolve(a.coef.clone(), "coef", "1".to_string())?)?;
    let mode = cfg.resolve(a.mode.clone(), "mode", "ball".to_string())?;
    let cells = cfg.resolve(a.cells, "M", default_cells)?;
    let grading = cfg.resolve(a.grading, "grading", 3.0)?;

    let mut spec = ProblemSpec::new(dim, theta, coef, Source::power_law(gamma, amp));
    match mode.as_str() {
        "ball" => {}
        "annulus" => {
            let r_min = cfg.resolve(a.rmin, "rmin", 0.1)?;
            spec = match cfg.resolve_opt(a.inner, "inner")? {
                Some(inner_value) => spec.with_mode(DomainMode::Annulus { r_min, inner_value }),
                None => match spec.clone().with_exact_annulus(r_min) {
                    Ok(s) => s,
                    Err(_) => spec.with_mode(DomainMode::Annulus { r_min, inner_value: 0.0 }),
                },
            };
        }
        other => return Err(Error::Input(format!("unknown mode `{other}` (ball, annulus)"))),
    }
    spec.validate()?;
    let mesh = Arc::new(build_mesh(&spec, cells, grading)?);
    Ok((spec, mesh))
}

fn solve_config(a: &IterationArgs, cfg: &ConfigFile) -> Result<SolveConfig> {
    let d = SolveConfig::default();
    let config = SolveConfig {
        tol_update: cfg.resolve(a.tol, "tol", d.tol_update)?,
        max_iter: cfg.resolve(a.max_iter, "max-iter", d.max_iter)?,
        damping: cfg.resolve(a.damping, "damping", d.damping)?,
    };
    config.validate()?;
    Ok(config)
}

fn schedule(flag: &Option<List<f64>>, cfg: &ConfigFile) -> Result<Vec<f64>> {
    Ok(cfg.resolve(flag.clone(), "schedule", List(default_schedule()))?.0)
}

#[derive(Serialize)]
struct ClassifyOutput {
    dim: u32,
    theta: f64,
    m: f64,
    llogl: bool,
    #[serde(flatten)]
    report: crate::regimes::RegimeReport,
}

pub fn classify_cmd(a: &ClassifyArgs) -> Result<Outcome> {
    let cfg = load_config(&a.output)?;
    let dim = cfg.resolve(a.dim, "N", 3u32)?;
    let theta: Param = cfg
        .resolve_opt(a.theta.clone(), "theta")?
        .ok_or_else(|| Error::Input("--theta is required".into()))?
        .parse()?;
    let m: Param = cfg
        .resolve_opt(a.m.clone(), "m")?
        .ok_or_else(|| Error::Input("--m is required".into()))?
        .parse()?;
    let llogl = cfg.switch(a.llogl, "llogl")?;
    let point = ClassPoint::new(dim, theta.clone(), m.clone(), llogl);
    let report = classify(&point)?;
    let fmt = format(&a.output, &cfg, Format::Json)?;
    write_to(&out_path(&a.output, &cfg)?, |w| {
        match fmt {
            Format::Json => {
                write_json(w, &ClassifyOutput { dim, theta: theta.to_f64(), m: m.to_f64(), llogl, report })?
            }
            Format::Csv => {
                writeln!(w, "N,theta,m,region,solution_space")?;
                let spaces: Vec<&str> = report.solution_space.iter().map(|s| s.label.as_str()).collect();
                writeln!(w, "{dim},{},{},{},{}", fmt_real(theta.to_f64()), fmt_real(m.to_f64()), report.region, spaces.join(";"))?;
            }
        }
        Ok(())
    })?;
    Ok(Outcome::Success)
}

pub fn solve_cmd(a: &SolveArgs) -> Result<Outcome> {
    let cfg = load_config(&a.output)?;
    let (spec, mesh) = build_problem(&a.spec, &cfg, 1024)?;
    let config = solve_config(&a.iteration, &cfg)?;
    let result = match cfg.resolve(a.method.clone(), "method", "oracle".to_string())?.as_str() {
        "oracle" => oracle_solve(&spec, &mesh)?,
        "picard" => picard_solve(&spec, &mesh, &config)?,
        other => return Err(Error::Input(format!("unknown method `{other}` (oracle, picard)"))),
    };
    let fmt = format(&a.output, &cfg, Format::Csv)?;
    write_to(&out_path(&a.output, &cfg)?, |w| match fmt {
        Format::Csv => write_solution_csv(w, &spec, &result),
        Format::Json => write_report_json(w, &spec, &result),
    })?;
    if let Some(path) = cfg.resolve_opt(a.report.clone(), "report")? {
        write_to(&path, |w| write_report_json(w, &spec, &result))?;
    }
    if result.converged() {
        Ok(Outcome::Success)
    } else {
        eprintln!(
            "warning: picard stopped with status {:?} after {} iterations (update {:.3e})",
            result.status, result.iterations, result.final_update
        );
        Ok(Outcome::NotConverged)
    }
}

fn opt_real(x: Option<f64>) -> String {
    x.map(fmt_real).unwrap_or_default()
}

pub fn sequence_cmd(a: &SequenceArgs) -> Result<Outcome> {
    let cfg = load_config(&a.output)?;
    let (spec, mesh) = build_problem(&a.spec, &cfg, 1024)?;
    let config = solve_config(&a.iteration, &cfg)?;
    let seq = truncated_sequence(&spec, &mesh, &config, &schedule(&a.schedule, &cfg)?)?;
    let rows = seq.rows();
    let fmt = format(&a.output, &cfg, Format::Csv)?;
    write_to(&out_path(&a.output, &cfg)?, |w| {
        match fmt {
            Format::Csv => {
                writeln!(w, "n,iterations,converged,w11_norm,critical_norm,w11_difference,flux_difference")?;
                for r in &rows {
                    writeln!(
                        w,
                        "{},{},{},{},{},{},{}",
                        fmt_real(r.n),
                        r.iterations,
                        r.converged,
                        fmt_real(r.w11_norm),
                        fmt_real(r.critical_norm),
                        opt_real(r.w11_difference),
                        opt_real(r.flux_difference)
                    )?;
                }
            }
            Format::Json => {
                #[derive(Serialize)]
                struct Out<'a> {
                    flux_exponent: f64,
                    all_converged: bool,
                    rows: &'a [crate::radial::sequence::SequenceRow],
                }
                write_json(w, &Out { flux_exponent: seq.flux_exponent, all_converged: seq.all_converged, rows: &rows })?;
            }
        }
        Ok(())
    })?;
    if let Some(path) = cfg.resolve_opt(a.report.clone(), "report")? {
        let reports: Vec<SolveReport<'_>> = seq.members.iter().map(|m| SolveReport::new(&spec, m)).collect();
        write_to(&path, |w| write_json(w, &reports))?;
    }
    Ok(if seq.all_converged { Outcome::Success } else { Outcome::NotConverged })
}

pub fn estimates_cmd(a: &EstimatesArgs) -> Result<Outcome> {
    let cfg = load_config(&a.output)?;
    let ids = match cfg.resolve_opt(a.ids.clone(), "ids")? {
        Some(list) => parse_ids(&list)?,
        None => EstimateId::ALL.to_vec(),
    };
    let (spec, mesh) = build_problem(&a.spec, &cfg, 1024)?;
    let config = solve_config(&a.iteration, &cfg)?;
    let d = EstimateParams::default();
    let params = EstimateParams {
        k_list: cfg.resolve(a.k_list.clone(), "k-list", List(d.k_list.clone()))?.0,
        m: cfg.resolve_opt(a.m, "m")?,
        rho: cfg.resolve_opt(a.rho, "rho")?,
        seed: cfg.resolve(a.seed, "seed", d.seed)?,
        samples: cfg.resolve(a.samples, "samples", d.samples)?,
        ..d
    };
    let strict = cfg.switch(a.strict, "strict")?;
    let seq = truncated_sequence(&spec, &mesh, &config, &schedule(&a.schedule, &cfg)?)?;
    let rows = check_estimates(&ids, EstimateInput { spec: &spec, members: &seq.members }, &params)?;
    let fmt = format(&a.output, &cfg, Format::Csv)?;
    write_to(&out_path(&a.output, &cfg)?, |w| match fmt {
        Format::Csv => write_ledger_csv(w, &rows),
        Format::Json => write_json(w, &rows),
    })?;
    let explicit_failures = rows.iter().filter(|r| r.explicit && r.failed()).count();
    if !seq.all_converged {
        eprintln!("warning: not every member of the truncation sequence converged");
        return Ok(Outcome::NotConverged);
    }
    if strict && explicit_failures > 0 {
        eprintln!("strict: {explicit_failures} explicit estimate rows failed");
        return Ok(Outcome::StrictFailure);
    }
    Ok(Outcome::Success)
}

pub fn exponents_cmd(a: &ExponentsArgs) -> Result<Outcome> {
    let cfg = load_config(&a.output)?;
    let (spec, mesh) = build_problem(&a.spec, &cfg, 4096)?;
    let window = pair(&cfg.resolve(a.window.clone(), "window", List(vec![1e-6, 1e-3]))?, "--window")?;
    let d = ThresholdConfig::default();
    let threshold_config = ThresholdConfig {
        q_range: pair(&cfg.resolve(a.q_range.clone(), "q-range", List(vec![d.q_range.0, d.q_range.1]))?, "--q-range")?,
        refinements: cfg.resolve(a.refinements.clone(), "refinements", List(d.refinements.clone()))?.0,
        grading: mesh.grading(),
        ..d
    };
    let oracle = oracle_solve(&spec, &mesh)?;
    let mut fit = fit_decay_slope(&oracle.u, window)?;
    if let Some(p) = predicted_decay_slope(&spec) {
        fit = fit.with_prediction(p);
    }
    let threshold = if spec.is_ball() { Some(gradient_integrability_threshold_with(&spec, &threshold_config)?) } else { None };
    let study = ExponentStudy::from_fit(&fit, threshold);
    let fmt = format(&a.output, &cfg, Format::Json)?;
    write_to(&out_path(&a.output, &cfg)?, |w| {
        match fmt {
            Format::Json => write_json(w, &study)?,
            Format::Csv => {
                writeln!(w, "predicted,fitted,relative_gap,window_lo,window_hi,residual,no_blow_up,q_star,q_predicted")?;
                let t = study.gradient_threshold.as_ref();
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{}",
                    opt_real(study.predicted),
                    fmt_real(study.fitted),
                    opt_real(study.relative_gap),
                    fmt_real(study.window.0),
                    fmt_real(study.window.1),
                    fmt_real(study.residual),
                    study.no_blow_up,
                    opt_real(t.and_then(|t| t.q_star)),
                    opt_real(t.and_then(|t| t.predicted))
                )?;
            }
        }
        Ok(())
    })?;
    Ok(Outcome::Success)
}

pub fn phase_cmd(a: &PhaseArgs) -> Result<Outcome> {
    let cfg = load_config(&a.output)?;
    let dim = cfg.resolve(a.dim, "N", 3u32)?;
    let List(grid) = cfg.resolve(a.grid.clone(), "grid", List(vec![100, 100]))?;
    let (theta_steps, m_steps) = match grid.as_slice() {
        &[t, m] => (t, m),
        _ => return Err(Error::Input("--grid needs THETA_STEPS,M_STEPS".into())),
    };
    let m_min: Param = match cfg.resolve_opt(a.m_min.clone(), "m-min")? {
        Some(s) => s.parse()?,
        None => Param::from(1i64),
    };
    let m_max: Param = match cfg.resolve_opt(a.m_max.clone(), "m-max")? {
        Some(s) => s.parse()?,
        None => Param::from(dim as i64),
    };
    let cells = phase_diagram_grid(dim, theta_steps, m_min, m_max, m_steps)?;
    let fmt = format(&a.output, &cfg, Format::Csv)?;
    write_to(&out_path(&a.output, &cfg)?, |w| match fmt {
        Format::Csv => Ok(write_phase_csv(w, &cells)?),
        Format::Json => write_json(w, &cells),
    })?;
    Ok(Outcome::Success)
}
