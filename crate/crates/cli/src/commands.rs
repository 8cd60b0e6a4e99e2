// Copyright 2026 The qnd Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{bail, Context as _, Result};
use qnd_core::analysis::{
    reproducibility_target, run_point, run_resonators, table2, two_significant, Direction, ResonatorStage,
    RunSettings, TABLE3_PARAMS,
};
use qnd_core::dynamics::{evolve_amplitudes, instantaneous_fidelity};
use qnd_core::oracle::{oracle_check as run_oracle, OracleCheck};
use qnd_core::report::{spectrum_csv, write_columns, write_csv, write_json, Manifest};
use qnd_core::resonator::dressed_frequency;
use qnd_core::spectrum::{solve_levels, solve_spectrum};
use qnd_core::{circuit::to_dimensionless, FailureStatus, FidelityReport, PhysicalParams, SweepRow};
use serde::Serialize;
use serde_json::{json, Value};

use crate::quantity::{kind_of, parse_range};

pub struct Context {
    pub params: PhysicalParams,
    pub settings: RunSettings,
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct OracleOptions {
    pub t_end: f64,
    pub dt: f64,
    pub points: usize,
    pub snapshots: usize,
}

/// Resolved configuration stored with every emitted file.
#[derive(Serialize)]
struct Resolved<'a> {
    params: &'a PhysicalParams,
    settings: &'a RunSettings,
    options: Value,
}

/// Collects emitted files and writes the manifest once the command is done.
struct Emitter<'a> {
    ctx: &'a Context,
    command: &'static str,
    options: Value,
    manifest: Manifest,
    files: Vec<String>,
}

impl<'a> Emitter<'a> {
    fn new(ctx: &'a Context, command: &'static str, options: Value) -> Self {
        Self {
            ctx,
            command,
            options,
            manifest: Manifest::new("qnd", env!("CARGO_PKG_VERSION")),
            files: Vec::new(),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.ctx.out.join(name)
    }

    fn record(&mut self, path: &Path) -> Result<()> {
        let resolved = Resolved {
            params: &self.ctx.params,
            settings: &self.ctx.settings,
            options: self.options.clone(),
        };
        self.manifest.record(path, self.command, &resolved)?;
        self.files.push(path.display().to_string());
        Ok(())
    }

    fn finish(self) -> Result<Vec<String>> {
        self.manifest.write(&self.ctx.out)?;
        Ok(self.files)
    }
}

fn progress(message: &str) {
    eprintln!("[qnd] {message}");
}

pub fn spectrum(ctx: &Context, phi_r: f64, levels: Option<usize>) -> Result<Value> {
    let dp = to_dimensionless(&ctx.params)?;
    let spec = match levels {
        Some(n) => solve_levels(phi_r, &dp, &ctx.settings.grid, n)?,
        None => solve_spectrum(phi_r, &dp, &ctx.settings.grid)?,
    };
    let mut emit = Emitter::new(ctx, "spectrum", json!({ "phi_r": phi_r, "levels": levels }));
    let path = emit.path("spectrum.csv");
    std::fs::write(&path, spectrum_csv(&spec, &dp))?;
    emit.record(&path)?;
    let f01 = (spec.energies.len() >= 2).then(|| spec.energies[1] - spec.energies[0]);
    Ok(json!({
        "phi_r": phi_r,
        "n_left": spec.n_left,
        "grid_points": spec.grid.count,
        "u_barrier_GHz": spec.geometry.u_barrier,
        "energies_GHz": spec.energies,
        "f01_GHz": f01,
        "files": emit.finish()?,
    }))
}

fn write_trajectory(emit: &mut Emitter<'_>, name: &str, traj: &qnd_core::ResonatorTrajectory) -> Result<()> {
    let path = emit.path(name);
    write_columns(
        &path,
        &["t_ns", "phi_r", "p_r", "theta"],
        &[&traj.t, &traj.phi_r, &traj.p_r, &traj.theta],
    )?;
    emit.record(&path)
}

pub fn phase(ctx: &Context, t_end: f64) -> Result<Value> {
    let mut s = ctx.settings;
    s.t_end = t_end;
    s.t_a = s.t_a.min(t_end);
    progress("tabulating spectra and integrating the resonator");
    let r = run_resonators(&ctx.params, &s)?;
    let mut emit = Emitter::new(ctx, "phase", json!({ "t_end_ns": t_end }));
    write_trajectory(&mut emit, "trajectory_0.csv", &r.traj0)?;
    write_trajectory(&mut emit, "trajectory_1.csv", &r.traj1)?;
    write_trajectory(&mut emit, "trajectory_ref.csv", &r.reference)?;
    let path = emit.path("phase.csv");
    let p = &r.phase;
    write_columns(
        &path,
        &["t_ns", "shift_0", "shift_1", "diff"],
        &[&p.t, &p.shift0, &p.shift1, &p.diff],
    )?;
    emit.record(&path)?;
    let summary = json!({
        "rate_rad_per_ns": p.rate,
        "theta_ta": p.diff_at(s.t_a),
        "t_a_ns": s.t_a,
        "A_0": r.traj0.amplitude,
        "A_1": r.traj1.amplitude,
        "A_ref": r.reference.amplitude,
        "f_bare_GHz": r.dp.f_r,
        "f_dressed_0_GHz": dressed_frequency(&r.traj0),
        "f_dressed_1_GHz": dressed_frequency(&r.traj1),
        "f_dressed_ref_GHz": dressed_frequency(&r.reference),
    });
    let path = emit.path("phase.json");
    write_json(&path, &summary)?;
    emit.record(&path)?;
    let mut out = summary;
    out["files"] = json!(emit.finish()?);
    Ok(out)
}

fn oracle_runs(r: &ResonatorStage, o: &OracleOptions, s: &RunSettings) -> Result<Vec<OracleCheck>> {
    [0, 1]
        .into_iter()
        .map(|n0| {
            progress(&format!(
                "split-step propagation of level {n0} over {} ns",
                o.t_end
            ));
            let traj = if n0 == 0 { &r.traj0 } else { &r.traj1 };
            Ok(run_oracle(
                n0,
                &r.dp,
                &r.table,
                traj,
                o.t_end,
                s.evolve.dt,
                o.dt,
                o.points,
                o.snapshots,
            )?)
        })
        .collect()
}

fn emit_oracle(emit: &mut Emitter<'_>, checks: &[OracleCheck]) -> Result<Value> {
    for c in checks {
        let path = emit.path(&format!("oracle_{}.csv", c.n0));
        write_columns(&path, &["t_ns", "overlap", "norm"], &[&c.t, &c.overlap, &c.norm])?;
        emit.record(&path)?;
    }
    let summary: Vec<Value> = checks
        .iter()
        .map(|c| json!({ "n0": c.n0, "min_overlap": c.min_overlap, "pass": c.min_overlap >= 0.999 }))
        .collect();
    let path = emit.path("oracle.json");
    write_json(&path, &summary)?;
    emit.record(&path)?;
    Ok(json!(summary))
}

pub fn fidelity(ctx: &Context, t_end: Option<f64>, oracle: Option<OracleOptions>) -> Result<Value> {
    let mut s = ctx.settings;
    let window = t_end.unwrap_or(s.t_a).max(s.t_a);
    s.t_end = s.t_end.max(window);
    progress("tabulating spectra and integrating the resonator");
    let r = run_resonators(&ctx.params, &s)?;
    let theta = r.phase.diff_at(s.t_a);
    let mut emit = Emitter::new(ctx, "fidelity", json!({ "t_end_ns": window, "oracle": oracle }));
    let mut reports = Vec::new();
    for n0 in [0, 1] {
        progress(&format!("evolving amplitudes of level {n0} over {window} ns"));
        let traj = if n0 == 0 { &r.traj0 } else { &r.traj1 };
        let amp = evolve_amplitudes(n0, &r.dp, &r.table, traj, window, &s.evolve)?;
        let report = FidelityReport::new(&amp, s.t_a, theta)?;
        let k: Vec<f64> = amp.k.iter().map(|&k| k as f64).collect();
        let path = emit.path(&format!("fidelity_{n0}.csv"));
        write_columns(
            &path,
            &["t_ns", "f", "norm", "K"],
            &[&amp.t, &instantaneous_fidelity(&amp), &amp.norm, &k],
        )?;
        emit.record(&path)?;
        let path = emit.path(&format!("truncation_{n0}.csv"));
        write_csv(&path, &report.truncation_events)?;
        emit.record(&path)?;
        let path = emit.path(&format!("fidelity_{n0}.json"));
        write_json(&path, &report)?;
        emit.record(&path)?;
        reports.push(report);
    }
    let mut summary = json!({
        "F0": reports[0].fidelity,
        "F1": reports[1].fidelity,
        "theta_ta": theta,
        "t_a_ns": s.t_a,
        "truncation_events": [reports[0].truncation_events.len(), reports[1].truncation_events.len()],
    });
    if let Some(o) = oracle {
        let checks = oracle_runs(&r, &o, &s)?;
        summary["oracle"] = emit_oracle(&mut emit, &checks)?;
    }
    summary["files"] = json!(emit.finish()?);
    Ok(summary)
}

pub fn oracle_check(ctx: &Context, o: &OracleOptions) -> Result<Value> {
    let mut s = ctx.settings;
    s.t_a = s.t_a.min(o.t_end);
    s.t_end = s.t_end.max(o.t_end);
    progress("tabulating spectra and integrating the resonator");
    let r = run_resonators(&ctx.params, &s)?;
    let mut emit = Emitter::new(ctx, "oracle-check", json!(o));
    let checks = oracle_runs(&r, o, &s)?;
    let summary = emit_oracle(&mut emit, &checks)?;
    Ok(json!({ "checks": summary, "files": emit.finish()? }))
}

/// Applies `f` to every item on up to `jobs` threads; results keep the input
/// order.
fn parallel_map<T: Sync, R: Send, F: Fn(usize, &T) -> R + Sync>(
    items: &[T],
    jobs: Option<usize>,
    f: F,
) -> Vec<R> {
    let workers = jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .clamp(1, items.len().max(1));
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<R>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(i, &items[i]);
                slots.lock().expect("no poisoned workers")[i] = Some(r);
            });
        }
    });
    slots
        .into_inner()
        .expect("no poisoned workers")
        .into_iter()
        .map(|r| r.expect("every item processed"))
        .collect()
}

fn run_rows(ctx: &Context, points: &[(String, f64, PhysicalParams)], jobs: Option<usize>) -> Vec<SweepRow> {
    let done = AtomicUsize::new(0);
    parallel_map(points, jobs, |_, (param, value, pp)| {
        let row = run_point(pp, &ctx.settings, param, *value);
        let n = done.fetch_add(1, Ordering::Relaxed) + 1;
        let state = match row.status {
            FailureStatus::Ok => format!("F0 {:?} F1 {:?}", row.f0, row.f1),
            FailureStatus::Failed => format!("failed: {}", row.error),
        };
        progress(&format!(
            "[{n}/{}] {param} = {value:e} M = {:e}: {state}",
            points.len(),
            pp.m
        ));
        row
    })
}

fn figure_file(param: &str) -> Result<&'static str> {
    Ok(match param {
        "M" => "fig5.csv",
        "L" => "fig6.csv",
        "C" => "fig7.csv",
        "Lr" => "fig8.csv",
        "Cr" => "fig9.csv",
        "I0" => "fig10.csv",
        other => bail!("unknown sweep parameter {other:?}; expected C, L, I0, Cr, Lr or M"),
    })
}

pub fn sweep(
    ctx: &Context,
    param: &str,
    range: Option<&str>,
    points: usize,
    m_variants: &[f64],
    jobs: Option<usize>,
) -> Result<Value> {
    let file = figure_file(param)?;
    let kind = kind_of(param).context("parameter has no unit kind")?;
    let base = ctx.params.get(param)?;
    let (lo, hi) = match range {
        Some(text) => parse_range(text, kind)?,
        None => (0.7 * base, 1.3 * base),
    };
    if points < 2 {
        bail!("a sweep needs at least two points");
    }
    let values: Vec<f64> = (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect();
    let ms: Vec<f64> = if param == "M" || m_variants.is_empty() {
        vec![ctx.params.m]
    } else {
        m_variants.to_vec()
    };
    let mut grid = Vec::new();
    for &v in &values {
        for &m in &ms {
            let mut pp = ctx.params.with_m(m);
            pp.set(param, v)?;
            grid.push((param.to_string(), v, pp));
        }
    }
    let rows = run_rows(ctx, &grid, jobs);
    let mut emit = Emitter::new(
        ctx,
        "sweep",
        json!({ "param": param, "values": values, "m_variants": ms }),
    );
    let path = emit.path(file);
    write_csv(&path, &rows)?;
    emit.record(&path)?;
    let failed = rows.iter().filter(|r| !r.is_ok()).count();
    Ok(json!({ "rows": rows.len(), "failed": failed, "files": emit.finish()? }))
}

#[derive(Serialize)]
struct Table2Row {
    f1: f64,
    t1_us: f64,
    t1_us_printed: String,
}

#[derive(Serialize)]
struct Table3Row {
    param: String,
    direction: Direction,
    f1_required: f64,
    target_percent: Option<i32>,
    status: FailureStatus,
    error: String,
}

pub fn tables(
    ctx: &Context,
    which: &[u8],
    f1_req: f64,
    t_m: f64,
    m_values: &[f64],
    jobs: Option<usize>,
) -> Result<Value> {
    let which: Vec<u8> = if which.is_empty() {
        vec![1, 2, 3]
    } else {
        which.to_vec()
    };
    if let Some(bad) = which.iter().find(|w| !(1..=3).contains(*w)) {
        bail!("no table {bad}; expected 1, 2 or 3");
    }
    let mut emit = Emitter::new(
        ctx,
        "tables",
        json!({ "which": which, "F1_req": f1_req, "t_m_ns": t_m, "m_values": m_values }),
    );
    let mut summary = json!({});
    if which.contains(&1) {
        let points: Vec<_> = m_values
            .iter()
            .map(|&m| ("M".to_string(), m, ctx.params.with_m(m)))
            .collect();
        let rows = run_rows(ctx, &points, jobs);
        let path = emit.path("table1.csv");
        write_csv(&path, &rows)?;
        emit.record(&path)?;
        summary["table1"] = json!(rows);
    }
    if which.contains(&2) {
        let rows: Vec<Table2Row> = table2(t_m)?
            .into_iter()
            .map(|(f1, t1)| Table2Row {
                f1,
                t1_us: t1,
                t1_us_printed: two_significant(t1),
            })
            .collect();
        let path = emit.path("table2.csv");
        write_csv(&path, &rows)?;
        emit.record(&path)?;
        summary["table2"] = json!(rows);
    }
    if which.contains(&3) {
        let rows = parallel_map(&TABLE3_PARAMS, jobs, |_, &(param, direction)| {
            let result =
                reproducibility_target(param, &ctx.params, f1_req, direction, &ctx.settings, |p, f| {
                    progress(&format!("{param} {p:+}%: F1 = {f:?}"))
                });
            match result {
                Ok(p) => Table3Row {
                    param: param.to_string(),
                    direction,
                    f1_required: f1_req,
                    target_percent: Some(p),
                    status: FailureStatus::Ok,
                    error: String::new(),
                },
                Err(e) => Table3Row {
                    param: param.to_string(),
                    direction,
                    f1_required: f1_req,
                    target_percent: None,
                    status: FailureStatus::Failed,
                    error: e.to_string(),
                },
            }
        });
        let path = emit.path("table3.csv");
        write_csv(&path, &rows)?;
        emit.record(&path)?;
        summary["table3"] = json!(rows);
    }
    summary["files"] = json!(emit.finish()?);
    Ok(summary)
}
