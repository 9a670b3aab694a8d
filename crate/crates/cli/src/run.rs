//! Executes a [`RunConfig`] and writes its artifacts.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use bfamily::characteristics::{self, FrameSeries, JacobianRule, TrajectorySet};
use bfamily::diagnostics::{self, BreakingStatus, InvariantReport};
use bfamily::equation::{Equation, State};
use bfamily::initdata::{self, InitError, InitialData};
use bfamily::integrator::{evolve, EvolveError, ObserveError, Observer};
use bfamily::spectral::Spectral;
use bfamily::tolerances;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::config::RunConfig;

pub const CSV_NAME: &str = "invariants.csv";
pub const SUMMARY_NAME: &str = "summary.json";
pub const FRAMES_DIR: &str = "frames";

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("initial data: {0}")]
    Init(#[from] InitError),
    #[error("observer failed at step {step}: {source}")]
    Observer { step: usize, source: ObserveError },
}

fn io_at(path: &Path) -> impl FnOnce(io::Error) -> RunError + '_ {
    move |source| RunError::Io { path: path.to_path_buf(), source }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Breakdown,
}

/// One audited quantity against its limit; `limit` is `None` for values
/// that are reported but not checked.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub value: f64,
    pub limit: Option<f64>,
    pub pass: Option<bool>,
}

impl Check {
    fn below(value: f64, limit: f64) -> Self {
        Self { value, limit: Some(limit), pass: Some(value < limit) }
    }

    fn info(value: f64) -> Self {
        Self { value, limit: None, pass: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub status: Status,
    pub breaking: Value,
    pub drifts: BTreeMap<String, Check>,
    pub residuals: BTreeMap<String, Value>,
    pub config_echo: BTreeMap<String, String>,
}

impl Summary {
    /// Names of checks that ran and failed.
    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .drifts
            .iter()
            .filter(|(_, c)| c.pass == Some(false))
            .map(|(k, _)| format!("drift {k}"))
            .collect();
        out.extend(
            self.residuals
                .iter()
                .filter(|(_, v)| v.get("pass") == Some(&Value::Bool(false)))
                .map(|(k, _)| k.clone()),
        );
        out
    }
}

/// Formats a value with 17 significant digits.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Records reports, frame files and characteristic frames as steps arrive.
struct Recorder<'a> {
    eq: &'a Equation,
    cfg: &'a RunConfig,
    total: usize,
    next_step: usize,
    frames_dir: PathBuf,
    reports: Vec<InvariantReport>,
    flow_frames: Option<(usize, FrameSeries)>,
    last: Option<State>,
}

impl Recorder<'_> {
    fn write_frame(&self, step: usize, s: &State) -> Result<(), ObserveError> {
        let path = self.frames_dir.join(format!("frame_{step:06}.txt"));
        let mut w = BufWriter::new(File::create(&path)?);
        writeln!(w, "t={} n={}", format_value(s.t), s.u.grid().len())?;
        for v in s.u.values() {
            writeln!(w, "{}", format_value(*v))?;
        }
        w.flush()?;
        Ok(())
    }
}

impl Observer for Recorder<'_> {
    fn observe(&mut self, s: &State) -> Result<(), ObserveError> {
        let k = self.next_step;
        self.next_step += 1;
        let last = k == self.total;
        if k.is_multiple_of(self.cfg.stride) || last {
            self.reports.push(diagnostics::report(s, self.eq)?);
        }
        let fs = self.cfg.frame_stride;
        if fs > 0 && (k.is_multiple_of(fs) || last) {
            self.write_frame(k, s)?;
        }
        if let Some((stride, series)) = &mut self.flow_frames {
            if k.is_multiple_of(*stride) || last {
                series.push(s.t, &s.u)?;
            }
        }
        self.last = Some(s.clone());
        Ok(())
    }
}

pub struct RunOutcome {
    pub summary: Summary,
    pub output_dir: PathBuf,
    pub reports: usize,
}

/// Runs `cfg`, writing every artifact into `output_dir`.
///
/// Numerical breakdown is not an error: it yields [`Status::Breakdown`] with
/// the partial series written out.
pub fn execute(cfg: &RunConfig, output_dir: &Path) -> Result<RunOutcome, RunError> {
    let frames_dir = output_dir.join(FRAMES_DIR);
    fs::create_dir_all(&frames_dir).map_err(io_at(&frames_dir))?;

    let spectral = Spectral::with_dealias(cfg.grid, cfg.dealias);
    let eq = Equation::new(spectral.clone(), cfg.parameters);
    let data = initdata::build(&cfg.init, &spectral)?;
    let s0 = State::new(0.0, data.u0.clone());

    let mut rec = Recorder {
        eq: &eq,
        cfg,
        total: cfg.step.step_count(),
        next_step: 0,
        frames_dir,
        reports: Vec::new(),
        flow_frames: cfg
            .checks
            .characteristics
            .as_ref()
            .map(|c| (c.frame_stride, FrameSeries::new(spectral.clone()))),
        last: None,
    };
    let result = evolve(&eq, &s0, &cfg.step, 1, &mut [&mut rec]);
    let (final_state, breakdown) = match result {
        Ok(ev) => {
            let b = ev.breakdown.map(|b| {
                json!({ "reason": "max-value guard", "t": b.t, "step": b.step, "value": b.value })
            });
            (ev.state, b)
        }
        Err(EvolveError::Step { step, source }) => {
            // Non-finite values or a CFL violation end the run like a guard trip.
            let last = rec.last.take().unwrap_or_else(|| s0.clone());
            (last, Some(json!({ "reason": source.to_string(), "step": step })))
        }
        Err(EvolveError::Observer { step, source }) => return Err(RunError::Observer { step, source }),
    };
    let reports = std::mem::take(&mut rec.reports);
    let flow_frames = rec.flow_frames.take().map(|(_, f)| f);

    write_csv(&output_dir.join(CSV_NAME), &reports)?;

    let mut echo = cfg.echo.clone();
    echo.insert("output.dir".into(), output_dir.display().to_string());
    let summary = summarize(cfg, &eq, &data, &reports, &final_state, flow_frames, breakdown, echo);
    let path = output_dir.join(SUMMARY_NAME);
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    fs::write(&path, text + "\n").map_err(io_at(&path))?;
    Ok(RunOutcome { summary, output_dir: output_dir.to_path_buf(), reports: reports.len() })
}

pub fn write_csv(path: &Path, reports: &[InvariantReport]) -> Result<(), RunError> {
    let file = File::create(path).map_err(io_at(path))?;
    let mut w = BufWriter::new(file);
    let mut body = || -> io::Result<()> {
        writeln!(w, "{}", InvariantReport::CSV_HEADER.join(","))?;
        for r in reports {
            let row: Vec<String> = r.csv_row().iter().map(|v| format_value(*v)).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        w.flush()
    };
    body().map_err(io_at(path))
}

/// Expected sign of the momentum, if the data is one-signed: `+1`, `−1` or `None`.
fn momentum_sign(data: &InitialData) -> Option<f64> {
    let tol = tolerances::sign_tolerance(data.m0.max_abs());
    if data.m0_min >= -tol {
        Some(1.0)
    } else if data.m0_max <= tol {
        Some(-1.0)
    } else {
        None
    }
}

#[allow(clippy::too_many_arguments)]
fn summarize(
    cfg: &RunConfig,
    eq: &Equation,
    data: &InitialData,
    reports: &[InvariantReport],
    final_state: &State,
    flow_frames: Option<FrameSeries>,
    breakdown: Option<Value>,
    config_echo: BTreeMap<String, String>,
) -> Summary {
    let par = cfg.parameters;
    let limit = cfg.checks.drift_tolerance;
    let drifts: BTreeMap<String, Check> = diagnostics::drift(reports, par)
        .entries()
        .into_iter()
        .map(|(name, value)| {
            let check = match limit {
                Some(l) => Check::below(value, l),
                None => Check::info(value),
            };
            (name.to_string(), check)
        })
        .collect();

    let mut residuals: BTreeMap<String, Value> = BTreeMap::new();
    let to_value = |c: Check| serde_json::to_value(c).expect("check serializes");
    let eq606 = reports.iter().map(|r| r.eq606_residual).fold(0.0, f64::max);
    residuals.insert(
        "eq606".into(),
        to_value(if par.conserves_mean() {
            Check::below(eq606, tolerances::NONLOCAL_IDENTITY)
        } else {
            // With p > 1 and b ≠ pc the residual is the extra non-local term itself.
            Check::info(eq606)
        }),
    );

    if cfg.checks.sign {
        if let Some(sign) = momentum_sign(data) {
            let worst = reports
                .iter()
                .map(|r| {
                    if sign > 0.0 {
                        (-r.min_m).max(-r.min_u)
                    } else {
                        r.max_m.max(r.max_u)
                    }
                })
                .fold(0.0, f64::max);
            residuals.insert(
                "sign".into(),
                json!({
                    "momentum_sign": if sign > 0.0 { "nonnegative" } else { "nonpositive" },
                    "value": worst,
                    "limit": tolerances::sign_tolerance(data.m0.max_abs()),
                    "pass": worst <= tolerances::sign_tolerance(data.m0.max_abs()),
                }),
            );
        }
    }

    if cfg.checks.growth {
        residuals.insert("growth".into(), growth_entry(reports, data, par));
    }

    if let (Some(check), Some(frames)) = (&cfg.checks.characteristics, flow_frames) {
        residuals.insert("characteristics".into(), flow_entry(check, cfg.step.dt(), &frames, eq, data, final_state));
    }

    if let Some(probe) = &cfg.checks.continuation {
        let entry = match diagnostics::continuation_probe(final_state, eq, probe.window, probe.delta) {
            Ok(p) => json!({
                "t": final_state.t,
                "window": [p.a, p.b],
                "window_max_u": p.window_max_u,
                "flux_jump": p.flux_jump,
                "smoothed_mass": p.smoothed_mass,
                "global_max_u": p.global_max_u,
                "delta": p.delta,
                "threshold": p.threshold,
                "pass": p.consistent,
            }),
            Err(e) => json!({ "error": e.to_string(), "pass": false }),
        };
        residuals.insert("continuation".into(), entry);
    }

    let monitor = match diagnostics::breaking_monitor(reports, cfg.checks.breaking_threshold, par) {
        BreakingStatus::Bounded { max_sum, envelope_held } => json!({
            "status": "bounded",
            "max_sup_u_plus_sup_ux": max_sum,
            "envelope_held": envelope_held,
        }),
        BreakingStatus::GuardTripped { t_star, value } => json!({
            "status": "guard-tripped",
            "t_star": t_star,
            "value": value,
        }),
    };
    let breaking = json!({
        "threshold": cfg.checks.breaking_threshold,
        "monitor": monitor,
        "integrator": breakdown,
        "t_reached": reports.last().map_or(0.0, |r| r.t),
    });

    let mut summary = Summary { status: Status::Pass, breaking, drifts, residuals, config_echo };
    summary.status = if summary.breaking["integrator"].is_null() {
        if summary.failures().is_empty() {
            Status::Pass
        } else {
            Status::Fail
        }
    } else {
        Status::Breakdown
    };
    summary
}

fn growth_entry(reports: &[InvariantReport], data: &InitialData, par: bfamily::Parameters) -> Value {
    let growth = match diagnostics::growth_envelope_check(reports, par) {
        Ok(g) => g,
        Err(e) => return json!({ "error": e.to_string(), "pass": false }),
    };
    let instantaneous_pass = growth.instantaneous_residual < tolerances::DI_IDENTITY;
    let mut entry = json!({
        "identity_residual": growth.identity_residual,
        "identity_pass": growth.identity_pass,
        "instantaneous_residual": growth.instantaneous_residual,
        "instantaneous_limit": tolerances::DI_IDENTITY,
        "slope_bound": growth.slope_bound,
        "rate": growth.rate,
        "envelope_ratio": growth.envelope_ratio,
        "envelope_pass": growth.envelope_pass,
    });
    let mut pass = growth.passed() && instantaneous_pass;
    match diagnostics::ux_bound_check(reports, &data.m0, par) {
        Ok(b) => {
            entry["ux_bound"] = json!({
                "c1": b.c1,
                "observed_max": b.observed_max,
                "margin": b.margin,
                "pass": b.pass,
            });
            pass &= b.pass;
        }
        // The slope bound only applies to one-signed momentum.
        Err(e) => entry["ux_bound"] = json!({ "skipped": e.to_string() }),
    }
    entry["pass"] = json!(pass);
    entry
}

fn flow_entry(
    check: &crate::config::CharacteristicsCheck,
    dt: f64,
    frames: &FrameSeries,
    eq: &Equation,
    data: &InitialData,
    final_state: &State,
) -> Value {
    let par = eq.parameters();
    let sp = eq.spectral();
    // Stage times of a 2·stride·dt step fall on stored frames.
    let h = 2.0 * check.frame_stride as f64 * dt;
    let t_end = final_state.t;
    if frames.len() < 2 {
        return json!({ "error": "not enough frames for the characteristic check", "pass": false });
    }
    let traj = match characteristics::integrate_flow(&TrajectorySet::uniform(check.seeds), frames, par, h, t_end)
    {
        Ok(t) => t,
        Err(e) => return json!({ "error": e.to_string(), "pass": false }),
    };
    let m = match eq.momentum(&final_state.u) {
        Ok(m) => sp.interpolant(&m),
        Err(e) => return json!({ "error": e.to_string(), "pass": false }),
    };
    let m0 = sp.interpolant(&data.m0);
    let ode = characteristics::flow_conservation_residual(&traj, &m, &m0, par, JacobianRule::CoupledOde);
    let quad = characteristics::flow_conservation_residual(&traj, &m, &m0, par, JacobianRule::Quadrature);
    let gap = traj.jacobian_gap();
    let min_jac = traj.jacobians(JacobianRule::CoupledOde).into_iter().fold(f64::INFINITY, f64::min);
    json!({
        "t": t_end,
        "seeds": check.seeds,
        "step": h,
        "residual": ode,
        "residual_quadrature": quad,
        "limit": check.tolerance,
        "jacobian_gap": gap,
        "jacobian_gap_limit": tolerances::JACOBIAN_GAP,
        "min_jacobian": min_jac,
        "monotone": traj.is_monotone(),
        "pass": ode.max(quad) < check.tolerance && gap < tolerances::JACOBIAN_GAP && min_jac > 0.0,
    })
}

/// Recomputes the drift table from a written `invariants.csv`.
pub fn drifts_from_csv(text: &str, par: bfamily::Parameters) -> Result<Vec<(String, f64)>, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty file")?;
    if header != InvariantReport::CSV_HEADER.join(",") {
        return Err(format!("unexpected header `{header}`"));
    }
    let mut series = Vec::new();
    for (i, line) in lines.enumerate() {
        let v: Vec<f64> = line
            .split(',')
            .map(|s| s.parse::<f64>().map_err(|e| format!("row {}: {e}", i + 1)))
            .collect::<Result<_, _>>()?;
        if v.len() != InvariantReport::CSV_HEADER.len() {
            return Err(format!("row {} has {} columns", i + 1, v.len()));
        }
        series.push(InvariantReport {
            t: v[0],
            h1: v[1],
            h2: v[2],
            m_total: v[3],
            l1_m: v[4],
            i_u: v[5],
            sup_u: v[6],
            sup_ux: v[7],
            min_m: v[8],
            max_m: v[9],
            f_min: v[10],
            f_max: v[11],
            eq606_residual: v[12],
            l1_u: 0.0,
            min_u: 0.0,
            max_u: 0.0,
            min_ux: 0.0,
            di_rhs: 0.0,
            di_identity_residual: None,
        });
    }
    Ok(diagnostics::drift(&series, par)
        .entries()
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect())
}

/// Reads a frame file written by a run.
pub fn read_frame(text: &str) -> Result<(f64, Vec<f64>), String> {
    let mut lines = text.lines();
    let head = lines.next().ok_or("empty frame")?;
    let (t, n) = head
        .strip_prefix("t=")
        .and_then(|rest| rest.split_once(" n="))
        .ok_or_else(|| format!("bad frame header `{head}`"))?;
    let t: f64 = t.parse().map_err(|e| format!("bad time: {e}"))?;
    let n: usize = n.parse().map_err(|e| format!("bad n: {e}"))?;
    let values: Vec<f64> = lines.map(|l| l.parse::<f64>().map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
    if values.len() != n {
        return Err(format!("expected {n} samples, found {}", values.len()));
    }
    Ok((t, values))
}
