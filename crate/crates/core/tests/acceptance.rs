// Copyright 2026 The qnd Authors
// SPDX-License-Identifier: Apache-2.0

//! Acceptance run: one PASS/FAIL line per criterion, with the individual
//! checks listed underneath. Exits non-zero if any criterion fails.
//!
//! The full run takes several minutes on one core; the reproducibility
//! searches dominate.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use qnd_core::analysis::{
    reproducibility_target, run_pipeline, run_resonators, table2, two_significant, uncertainty_budget,
    PointResult, RunSettings, TABLE3_PARAMS,
};
use qnd_core::circuit::{mr_initial_state, to_dimensionless};
use qnd_core::dynamics::{evolve_fixed, nonadiabatic_couplings, step_bound};
use qnd_core::oracle::oracle_check;
use qnd_core::resonator::{classical_hamiltonian, effective_energy, integrate_full_classical, Drive};
use qnd_core::spectrum::{
    left_well_domain, plasma_frequency, potential_curvature, solve_levels, solve_potential, well_geometry,
    Grid, GridSpec,
};
use qnd_core::{CanonicalState, DimensionlessParams, InstantSpectrum, PhysicalParams, ResponseCurve};

/// Checks of one criterion.
#[derive(Default)]
struct Checks(Vec<(bool, String)>);

impl Checks {
    fn check(&mut self, ok: bool, detail: impl Into<String>) {
        self.0.push((ok, detail.into()));
    }

    fn within(&mut self, name: &str, value: f64, target: f64, tol: f64) {
        let ok = (value - target).abs() <= tol;
        self.check(ok, format!("{name} = {value:.6} (target {target}, ±{tol:.3e})"));
    }

    fn within_rel(&mut self, name: &str, value: f64, target: f64, rel: f64) {
        let ok = (value / target - 1.0).abs() <= rel;
        self.check(
            ok,
            format!(
                "{name} = {value:.6} (target {target}, ±{:.1}%, off by {:+.1}%)",
                rel * 100.0,
                (value / target - 1.0) * 100.0
            ),
        );
    }

    fn error(&mut self, what: &str, e: impl std::fmt::Display) {
        self.check(false, format!("{what}: {e}"));
    }
}

struct Summary {
    failed: Vec<String>,
}

impl Summary {
    fn report(&mut self, id: &str, title: &str, started: Instant, checks: Checks) {
        let ok = !checks.0.is_empty() && checks.0.iter().all(|(ok, _)| *ok);
        println!(
            "criterion {id:>2} {} {title} [{:.1} s]",
            if ok { "PASS" } else { "FAIL" },
            started.elapsed().as_secs_f64()
        );
        for (ok, detail) in &checks.0 {
            println!("    {} {detail}", if *ok { "ok  " } else { "FAIL" });
        }
        if !ok {
            self.failed.push(id.to_string());
        }
    }
}

const NH: f64 = 1e-9;

/// One published row of the M table.
struct Row {
    m: f64,
    n_min: usize,
    n_max: usize,
    f_min: f64,
    f_max: f64,
    f0: f64,
    f1: f64,
    f0_tol: f64,
    f1_tol: f64,
    theta: f64,
}

const ROWS: [Row; 2] = [
    Row {
        m: 1.0,
        n_min: 4,
        n_max: 14,
        f_min: 8.84,
        f_max: 10.98,
        f0: 0.9997,
        f1: 0.9989,
        f0_tol: 1e-3,
        f1_tol: 2e-3,
        theta: 0.044,
    },
    Row {
        m: 0.5,
        n_min: 4,
        n_max: 7,
        f_min: 8.85,
        f_max: 9.58,
        f0: 0.99997,
        f1: 0.99987,
        f0_tol: 1e-3,
        f1_tol: 1e-3,
        theta: 0.020,
    },
];

fn row_checks(c: &mut Checks, row: &Row, r: &PointResult) {
    let m = row.m;
    let e = &r.extremes;
    c.check(
        e.n_min == row.n_min,
        format!("M = {m} nH: N_min = {} (target {})", e.n_min, row.n_min),
    );
    c.check(
        e.n_max.abs_diff(row.n_max) <= 1,
        format!("M = {m} nH: N_max = {} (target {} ± 1)", e.n_max, row.n_max),
    );
    c.within_rel(&format!("M = {m} nH: f_min/GHz"), e.f_min, row.f_min, 0.03);
    c.within_rel(&format!("M = {m} nH: f_max/GHz"), e.f_max, row.f_max, 0.03);
    c.within(
        &format!("M = {m} nH: F0"),
        r.fidelity0.fidelity,
        row.f0,
        row.f0_tol,
    );
    c.within(
        &format!("M = {m} nH: F1"),
        r.fidelity1.fidelity,
        row.f1,
        row.f1_tol,
    );
    c.within_rel(
        &format!("M = {m} nH: θ(t_a)/rad"),
        r.fidelity0.theta_at_ta,
        row.theta,
        0.15,
    );
}

/// `⟨ψ_k(φ)|ψ_m(φ+h) − ψ_m(φ−h)⟩/2h` on a frozen grid.
fn central_difference(
    dp: &DimensionlessParams,
    spec: &GridSpec,
    phi: f64,
    h: f64,
    levels: usize,
) -> Vec<Vec<f64>> {
    let centre = solve_levels(phi, dp, spec, levels).unwrap();
    let side = |x: f64| {
        let mut s = solve_levels(x, dp, spec, levels).unwrap();
        s.align_gauge(&centre);
        s
    };
    let (plus, minus) = (side(phi + h), side(phi - h));
    let dot = |a: &InstantSpectrum, k: usize, v: &[f64]| -> f64 {
        a.wavefunctions[k].iter().zip(v).map(|(x, y)| x * y).sum::<f64>() * a.grid.step
    };
    (0..levels)
        .map(|k| {
            (0..levels)
                .map(|m| {
                    let d: Vec<f64> = plus.wavefunctions[m]
                        .iter()
                        .zip(&minus.wavefunctions[m])
                        .map(|(p, q)| (p - q) / (2.0 * h))
                        .collect();
                    dot(&centre, k, &d)
                })
                .collect()
        })
        .collect()
}

fn main() -> ExitCode {
    let total = Instant::now();
    let mut summary = Summary { failed: Vec::new() };
    let settings = RunSettings::default();
    let working = PhysicalParams::working();
    let dp = to_dimensionless(&working).expect("working point is valid");

    // Criterion 1: bare resonator frequency.
    let t = Instant::now();
    let mut c = Checks::default();
    c.within_rel("f_r/GHz", dp.f_r, 0.5, 1e-3);
    summary.report("1", "bare resonator frequency", t, c);

    // Full runs shared by several criteria.
    let t_runs = Instant::now();
    let runs: Vec<(f64, qnd_core::Result<PointResult>)> = [1.0, 0.5, 0.75]
        .into_iter()
        .map(|m| (m, run_pipeline(&working.with_m(m * NH), &settings)))
        .collect();
    println!(
        "(full runs at M = 1.0, 0.5, 0.75 nH: {:.1} s)",
        t_runs.elapsed().as_secs_f64()
    );
    let at = |m: f64| {
        runs.iter()
            .find(|(x, _)| *x == m)
            .map(|(_, r)| r.as_ref())
            .unwrap()
    };
    let base = at(1.0);

    // Criterion 2: phase-difference rate.
    let t = Instant::now();
    let mut c = Checks::default();
    match base {
        Ok(r) => c.within_rel("rate at M = 1.0 nH /(rad/ns)", r.phase.rate.abs(), 0.0044, 0.15),
        Err(e) => c.error("M = 1.0 nH", e),
    }
    match run_resonators(&working.with_m(1.8 * NH), &settings) {
        Ok(stage) => c.within_rel(
            "rate at M = 1.8 nH /(rad/ns)",
            stage.phase.rate.abs(),
            0.008,
            0.15,
        ),
        Err(e) => c.error("M = 1.8 nH", e),
    }
    summary.report("2", "phase-difference rate", t, c);

    // Criterion 3: rows of the M table.
    let t = Instant::now();
    let mut c = Checks::default();
    for row in &ROWS {
        match at(row.m) {
            Ok(r) => row_checks(&mut c, row, r),
            Err(e) => c.error(&format!("M = {} nH", row.m), e),
        }
    }
    summary.report("3", "level counts, frequencies, fidelities, θ(t_a)", t, c);

    // Criterion 4: relaxation-time table.
    let t = Instant::now();
    let mut c = Checks::default();
    let printed = ["0.22", "0.47", "0.97", "2.5", "5.0", "50", "500"];
    match table2(100.0) {
        Ok(rows) => {
            for ((f1, t1), want) in rows.iter().zip(printed) {
                let got = two_significant(*t1);
                c.check(got == want, format!("F1 = {f1}: T1 = {got} μs (printed {want})"));
            }
        }
        Err(e) => c.error("table", e),
    }
    summary.report("4", "relaxation-time requirements", t, c);

    // Criterion 5: reproducibility targets.
    let t = Instant::now();
    let mut c = Checks::default();
    let published = [
        ("M", 17),
        ("L", -22),
        ("C", 21),
        ("I0", -24),
        ("Lr", -13),
        ("Cr", -30),
    ];
    for (param, direction) in TABLE3_PARAMS {
        let want = published.iter().find(|(p, _)| *p == param).unwrap().1;
        let started = Instant::now();
        let found = reproducibility_target(param, &working, 0.9985, direction, &settings, |_, _| {});
        let secs = started.elapsed().as_secs_f64();
        match found {
            Ok(got) if matches!(param, "M" | "Lr") => c.check(
                (got - want).abs() <= 5,
                format!("{param}: {got:+}% (published {want:+}% ± 5 points) [{secs:.0} s]"),
            ),
            Ok(got) => c.check(
                got != 0 && got.signum() == want.signum(),
                format!("{param}: {got:+}% (published {want:+}%, sign only) [{secs:.0} s]"),
            ),
            Err(e) => c.error(param, e),
        }
    }
    summary.report("5", "reproducibility targets at F1 = 0.9985", t, c);

    // Criterion 6: uncertainty budget.
    let t = Instant::now();
    let mut c = Checks::default();
    let rate = base.as_ref().map_or(0.0044, |r| r.phase.rate.abs());
    // The published budget takes f_r as exactly 500 MHz.
    match uncertainty_budget(working.n_quanta, 1e4, 0.5, 100.0, rate) {
        Ok(b) => {
            c.check(
                format!("{:.3}", b.quantum_phase_unc) == "0.158",
                format!("(4⟨N⟩)^(-1/2) = {:.6} rad (printed 0.158)", b.quantum_phase_unc),
            );
            c.within(
                "Q-limited phase width/rad",
                b.q_factor_phase_unc,
                PI * 1e-2,
                1e-6 * PI * 1e-2,
            );
        }
        Err(e) => c.error("budget", e),
    }
    if let Ok(b) = uncertainty_budget(working.n_quanta, 1e4, dp.f_r, 100.0, rate) {
        println!(
            "info: at the computed f_r = {:.6} GHz the Q-limited width is {:.6} rad",
            dp.f_r, b.q_factor_phase_unc
        );
    }
    summary.report("6", "phase uncertainty budget", t, c);

    // Criterion 7: moving-basis state against direct propagation.
    let t = Instant::now();
    let mut c = Checks::default();
    match base {
        Ok(r) => {
            for (n0, traj) in [(0, &r.traj0), (1, &r.traj1)] {
                match oracle_check(n0, &r.dp, &r.table, traj, 1.0, 1e-3, 1e-4, 2048, 10) {
                    Ok(o) => c.check(
                        o.min_overlap >= 0.999,
                        format!(
                            "level {n0}: minimum overlap over 1 ns = {:.7} (≥ 0.999)",
                            o.min_overlap
                        ),
                    ),
                    Err(e) => c.error(&format!("level {n0}"), e),
                }
            }
        }
        Err(e) => c.error("M = 1.0 nH", e),
    }
    summary.report("7", "oracle equivalence", t, c);

    // Criterion 8: zero coupling.
    let t = Instant::now();
    let mut c = Checks::default();
    match run_pipeline(&working.with_m(0.0), &settings) {
        Ok(r) => {
            let worst = r.phase.diff.iter().fold(0.0f64, |m, d| m.max(d.abs()));
            c.check(worst < 1e-12, format!("|θ0 − θ1| ≤ {worst:.2e} rad"));
            c.check(
                r.fidelity0.fidelity == 1.0 && r.fidelity1.fidelity == 1.0,
                format!("F0 = {}, F1 = {}", r.fidelity0.fidelity, r.fidelity1.fidelity),
            );
            for n in 0..2 {
                let d = r.table.expected_delta_samples(n);
                let spread = d.iter().fold(0.0f64, |m, x| m.max((x - d[0]).abs()));
                c.check(
                    spread < 1e-9,
                    format!("response curve {n} varies by {spread:.2e}"),
                );
            }
        }
        Err(e) => c.error("M = 0", e),
    }
    summary.report("8", "null coupling", t, c);

    // Criterion 9: conservation.
    let t = Instant::now();
    let mut c = Checks::default();
    let classical = (|| {
        let g = well_geometry(0.0, &dp)?;
        let start =
            CanonicalState::from_resonator(mr_initial_state(&dp, working.n_quanta)?, g.delta_left_min, 0.0);
        let series = integrate_full_classical(&dp, start, 10.0, 2e-5, 1000)?;
        let e0 = classical_hamiltonian(&dp, &start);
        Ok::<_, qnd_core::Error>(
            series
                .states
                .iter()
                .map(|s| (classical_hamiltonian(&dp, s) / e0 - 1.0).abs())
                .fold(0.0, f64::max),
        )
    })();
    match classical {
        Ok(d) => c.check(
            d <= 1e-8,
            format!("full classical H over 10 ns: drift {d:.2e} (≤ 1e-8)"),
        ),
        Err(e) => c.error("full classical H", e),
    }
    match base {
        Ok(r) => {
            for (n, traj) in [(0, &r.traj0), (1, &r.traj1)] {
                let curve = ResponseCurve::from_table(&r.table, n).expect("levels 0 and 1 are tabulated");
                let e = |x: f64, p: f64| effective_energy(&r.dp, Drive::Level(&curve), x, p);
                let e0 = e(traj.phi_r[0], traj.p_r[0]);
                let d = traj
                    .phi_r
                    .iter()
                    .zip(&traj.p_r)
                    .map(|(&x, &p)| (e(x, p) / e0 - 1.0).abs())
                    .fold(0.0, f64::max);
                c.check(
                    d <= 1e-8,
                    format!("effective energy, level {n}, 100 ns: drift {d:.2e} (≤ 1e-8)"),
                );
            }
            for amp in [&r.amp0, &r.amp1] {
                let mut events = amp.truncation_events.iter().map(|e| e.t).peekable();
                let (mut drift, mut worst) = (0.0f64, 0.0f64);
                for i in 1..amp.t.len() {
                    let mut crossed = false;
                    while events.peek().is_some_and(|&t| t <= amp.t[i] + 1e-12) {
                        events.next();
                        crossed = true;
                    }
                    drift = if crossed {
                        0.0
                    } else {
                        drift + (amp.norm[i] - amp.norm[i - 1]).abs()
                    };
                    worst = worst.max(drift);
                }
                c.check(
                    worst <= 1e-6,
                    format!(
                        "amplitude norm, level {}: drift {worst:.2e} between {} truncation event(s) (≤ 1e-6)",
                        amp.n0,
                        amp.truncation_events.len()
                    ),
                );
            }
        }
        Err(e) => c.error("M = 1.0 nH", e),
    }
    summary.report("9", "conservation", t, c);

    // Criterion 10: structural invariants.
    let t = Instant::now();
    let mut c = Checks::default();
    let mut rows: Vec<(f64, &PointResult)> = Vec::new();
    for (m, r) in &runs {
        match r {
            Ok(r) => {
                c.check(
                    r.fidelity0.fidelity >= r.fidelity1.fidelity,
                    format!(
                        "M = {m} nH: F0 = {:.6} ≥ F1 = {:.6}",
                        r.fidelity0.fidelity, r.fidelity1.fidelity
                    ),
                );
                rows.push((*m, r));
            }
            Err(e) => c.error(&format!("M = {m} nH"), e),
        }
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in rows.windows(2) {
        let ((ma, a), (mb, b)) = (w[0], w[1]);
        let ok = a.fidelity0.fidelity >= b.fidelity0.fidelity
            && a.fidelity1.fidelity >= b.fidelity1.fidelity
            && a.fidelity0.theta_at_ta.abs() <= b.fidelity0.theta_at_ta.abs()
            && a.extremes.n_max <= b.extremes.n_max
            && a.extremes.f_max <= b.extremes.f_max;
        c.check(
            ok,
            format!("M {ma} → {mb} nH: F0, F1 fall; |θ(t_a)|, N_max, f_max rise"),
        );
    }
    for phi in [0.0, -2.5] {
        let g = well_geometry(phi, &dp).unwrap();
        let (a, b) = left_well_domain(phi, &dp, &g);
        let spec = GridSpec::fixed(2048).with_domain(a, b);
        let levels = solve_levels(phi, &dp, &spec, 8).unwrap().n_left.min(4);
        let s = solve_levels(phi, &dp, &spec, levels).unwrap();
        let hf = nonadiabatic_couplings(&s, &dp, 1.0).unwrap();
        let h = 1e-3;
        let coarse = central_difference(&dp, &spec, phi, h, levels);
        let fine = central_difference(&dp, &spec, phi, 0.5 * h, levels);
        let mut worst = 0.0f64;
        for k in 0..levels {
            for m in (0..levels).filter(|&m| m != k) {
                let fd = (4.0 * fine[k][m] - coarse[k][m]) / 3.0;
                worst = worst.max((fd - hf[k][m]).abs() / hf[k][m].abs());
            }
        }
        c.check(
            worst <= 1e-4,
            format!("φ_r = {phi}: Hellmann–Feynman vs finite differences, {worst:.2e} relative"),
        );
    }
    {
        let g = well_geometry(0.0, &dp).unwrap();
        let x0 = g.delta_left_min;
        let k = potential_curvature(x0, &dp);
        let grid = Grid::interior(x0 - 1.5, x0 + 1.5, 2048);
        let (e, psi) = solve_potential(|x| 0.5 * k * (x - x0).powi(2), dp.kinetic, grid, 6);
        let fp = plasma_frequency(x0, &dp);
        let worst = (0..5)
            .map(|n| ((e[n + 1] - e[n]) / fp - 1.0).abs())
            .fold(0.0, f64::max);
        c.check(
            worst <= 0.05,
            format!("harmonic well: level spacing / plasma frequency off by {worst:.2e}"),
        );
        let d01: f64 = psi[0]
            .iter()
            .zip(&psi[1])
            .enumerate()
            .map(|(i, (a, b))| a * grid.x(i) * b)
            .sum::<f64>()
            * grid.step;
        let expected = (dp.kinetic / fp).sqrt();
        let err = (d01.abs() / expected - 1.0).abs();
        c.check(
            err <= 1e-3,
            format!("harmonic well: ⟨0|δ|1⟩ off by {err:.2e} relative"),
        );
    }
    summary.report("10", "structural invariants", t, c);

    // Criterion 11: grid and step convergence.
    let t = Instant::now();
    let mut c = Checks::default();
    for phi in [0.0, -5.0, -10.0] {
        let chosen = solve_levels(phi, &dp, &GridSpec::default(), 4).unwrap();
        let points = chosen.grid.count;
        let halved = solve_levels(phi, &dp, &GridSpec::fixed(2 * points + 1), 4).unwrap();
        let shift = (0..chosen.n_left.min(4))
            .map(|m| (chosen.energies[m] - halved.energies[m]).abs())
            .fold(0.0, f64::max);
        c.check(
            shift <= 1e-4,
            format!("φ_r = {phi}: grid halving from {points} points moves E_m by {shift:.2e} GHz"),
        );
    }
    let half = RunSettings {
        dt_resonator: 0.5 * settings.dt_resonator,
        ..settings
    };
    match (
        run_resonators(&working, &settings),
        run_resonators(&working, &half),
    ) {
        (Ok(a), Ok(b)) => {
            let (ta, tb) = (a.phase.diff.last().unwrap(), b.phase.diff.last().unwrap());
            let d = (ta - tb).abs();
            c.check(d <= 1e-6, format!("step halving moves θ(t_end) by {d:.2e} rad"));
        }
        (Err(e), _) | (_, Err(e)) => c.error("resonator step halving", e),
    }
    match base {
        Ok(r) => {
            for (n0, traj) in [(0, &r.traj0), (1, &r.traj1)] {
                let dt = step_bound(&r.table, settings.evolve.dt);
                let pair = evolve_fixed(n0, &r.dp, &r.table, traj, settings.t_a, dt).and_then(|a| {
                    Ok((
                        a,
                        evolve_fixed(n0, &r.dp, &r.table, traj, settings.t_a, 0.5 * dt)?,
                    ))
                });
                match pair {
                    Ok((a, b)) => {
                        let d =
                            a.c.last()
                                .unwrap()
                                .iter()
                                .zip(b.c.last().unwrap())
                                .map(|(x, y)| (x - y).norm())
                                .fold(0.0, f64::max);
                        c.check(
                            d <= 1e-6,
                            format!("level {n0}: step halving moves final C by {d:.2e}"),
                        );
                    }
                    Err(e) => c.error(&format!("level {n0} step halving"), e),
                }
            }
        }
        Err(e) => c.error("M = 1.0 nH", e),
    }
    summary.report("11", "grid and step convergence", t, c);

    // Not a criterion: the Dirichlet wall at the barrier top.
    let g = well_geometry(0.0, &dp).unwrap();
    let (a, b) = left_well_domain(0.0, &dp, &g);
    let points = 8191;
    let step = (b - a) / (points + 1) as f64;
    let wide = (((b - a) * 1.2) / step) as usize - 1;
    let near = solve_levels(0.0, &dp, &GridSpec::fixed(points).with_domain(a, b), 2).unwrap();
    let far = solve_levels(
        0.0,
        &dp,
        &GridSpec::fixed(wide).with_domain(a, a + (wide + 1) as f64 * step),
        2,
    )
    .unwrap();
    println!(
        "info: moving the right wall 20% past the barrier shifts E0 by {:.1e} GHz, E1 by {:.1e} GHz",
        (near.energies[0] - far.energies[0]).abs(),
        (near.energies[1] - far.energies[1]).abs()
    );

    println!("total {:.0} s", total.elapsed().as_secs_f64());
    if summary.failed.is_empty() {
        println!("all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("failing criteria: {}", summary.failed.join(", "));
        ExitCode::FAILURE
    }
}
