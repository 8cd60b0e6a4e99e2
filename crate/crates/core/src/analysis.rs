// Copyright 2026 The qnd Authors
// SPDX-License-Identifier: Apache-2.0

//! Full pipeline per parameter point, parameter sweeps, the relaxation-time
//! budget, reproducibility targets and the phase-uncertainty budget.

use serde::{Deserialize, Serialize};

use crate::circuit::{mr_initial_state, to_dimensionless, DimensionlessParams, PhysicalParams};
use crate::dynamics::{evolve_amplitudes, AmplitudeTrajectory, EvolveOptions, FidelityReport};
use crate::resonator::{
    dressed_frequency, estimate_flux_range, integrate_resonator, phase_observables, reference_trajectory,
    Drive, PhaseObservables, ResonatorTrajectory, ResponseCurve,
};
use crate::spectrum::GridSpec;
use crate::table::{SpectralTable, DEFAULT_FLUX_STEP};
use crate::{Error, Result};

/// Numerical settings of one pipeline run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunSettings {
    /// Fidelity averaging window, ns.
    pub t_a: f64,
    /// Length of the resonator runs used for the phase rate, ns.
    pub t_end: f64,
    /// Resonator integration step, ns.
    pub dt_resonator: f64,
    pub evolve: EvolveOptions,
    pub grid: GridSpec,
    /// Flux spacing of the spectral table.
    pub flux_step: f64,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            t_a: 10.0,
            t_end: 100.0,
            dt_resonator: 1e-3,
            evolve: EvolveOptions::default(),
            grid: GridSpec::default(),
            flux_step: DEFAULT_FLUX_STEP,
        }
    }
}

/// Phases sampled along one resonator cycle for the level-count extremes.
pub const CYCLE_SAMPLES: usize = 64;

/// Everything computed at one parameter point.
#[derive(Debug, Clone)]
pub struct PointResult {
    pub dp: DimensionlessParams,
    pub table: SpectralTable,
    pub traj0: ResonatorTrajectory,
    pub traj1: ResonatorTrajectory,
    pub reference: ResonatorTrajectory,
    pub phase: PhaseObservables,
    pub fidelity0: FidelityReport,
    pub fidelity1: FidelityReport,
    pub extremes: CycleExtremes,
    pub amp0: AmplitudeTrajectory,
    pub amp1: AmplitudeTrajectory,
}

/// Extremes of the left-well level count and the qubit frequency over one
/// resonator cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleExtremes {
    pub n_min: usize,
    pub n_max: usize,
    pub f_min: f64,
    pub f_max: f64,
}

fn padded(lo: f64, hi: f64, fraction: f64) -> (f64, f64) {
    let pad = (fraction * (hi - lo)).max(0.05);
    (lo - pad, hi + pad)
}

/// Spectral table plus the two resonator runs over a table range that is
/// widened until both runs stay inside it.
fn resonator_stage(
    dp: &DimensionlessParams,
    pp: &PhysicalParams,
    s: &RunSettings,
) -> Result<(SpectralTable, ResonatorTrajectory, ResonatorTrajectory)> {
    let initial = mr_initial_state(dp, pp.n_quanta)?;
    let (lo, hi) = estimate_flux_range(dp, initial)?;
    let mut fraction = 0.05;
    let mut attempts = 0;
    loop {
        let (a, b) = padded(lo, hi, fraction);
        let table = SpectralTable::build(dp, a, b, s.flux_step, None, &s.grid)?;
        let runs = (|| {
            let c0 = ResponseCurve::from_table(&table, 0)?;
            let c1 = ResponseCurve::from_table(&table, 1)?;
            let t0 = integrate_resonator(Some(0), dp, Drive::Level(&c0), initial, s.t_end, s.dt_resonator)?;
            let t1 = integrate_resonator(Some(1), dp, Drive::Level(&c1), initial, s.t_end, s.dt_resonator)?;
            Ok((t0, t1))
        })();
        match runs {
            Ok((t0, t1)) => return Ok((table, t0, t1)),
            Err(Error::CurveRangeExceeded { .. }) if attempts < 3 => {
                attempts += 1;
                fraction += 0.25;
            }
            Err(e) => return Err(e),
        }
    }
}

/// Level-count and qubit-frequency extremes over the first cycle of `traj`.
pub fn cycle_extremes(table: &SpectralTable, traj: &ResonatorTrajectory) -> Result<CycleExtremes> {
    let f = dressed_frequency(traj).ok_or(Error::DegenerateTrajectory)?;
    let period = 1.0 / f;
    let h = traj.step();
    let last = ((period / h).ceil() as usize).min(traj.len() - 1);
    let cycle = &traj.phi_r[..=last];
    let (lo, hi) = cycle
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
            (a.min(x), b.max(x))
        });
    let mut fluxes: Vec<f64> = (0..CYCLE_SAMPLES)
        .map(|j| {
            let t = period * j as f64 / CYCLE_SAMPLES as f64;
            let i = ((t / h) as usize).min(traj.len() - 2);
            let w = (t - traj.t[i]) / h;
            traj.phi_r[i] * (1.0 - w) + traj.phi_r[i + 1] * w
        })
        .collect();
    fluxes.push(lo);
    fluxes.push(hi);
    let mut out = CycleExtremes {
        n_min: usize::MAX,
        n_max: 0,
        f_min: f64::INFINITY,
        f_max: f64::NEG_INFINITY,
    };
    for x in fluxes {
        let n = table.n_left_at(x);
        out.n_min = out.n_min.min(n);
        out.n_max = out.n_max.max(n);
        let f01 = table.energy(1, x) - table.energy(0, x);
        out.f_min = out.f_min.min(f01);
        out.f_max = out.f_max.max(f01);
    }
    Ok(out)
}

/// Resonator half of the pipeline: table, level-driven runs for both qubit
/// states, the decoupled reference and the phase observables.
#[derive(Debug, Clone)]
pub struct ResonatorStage {
    pub dp: DimensionlessParams,
    pub table: SpectralTable,
    pub traj0: ResonatorTrajectory,
    pub traj1: ResonatorTrajectory,
    pub reference: ResonatorTrajectory,
    pub phase: PhaseObservables,
}

pub fn run_resonators(pp: &PhysicalParams, s: &RunSettings) -> Result<ResonatorStage> {
    let dp = to_dimensionless(pp)?;
    if s.t_end < s.t_a {
        return Err(Error::WindowExceedsSeries {
            t_a: s.t_a,
            t_end: s.t_end,
        });
    }
    let (table, traj0, traj1) = resonator_stage(&dp, pp, s)?;
    let initial = mr_initial_state(&dp, pp.n_quanta)?;
    let reference = reference_trajectory(&dp, initial, s.t_end, s.dt_resonator)?;
    let phase = phase_observables(&traj0, &traj1, &reference)?;
    Ok(ResonatorStage {
        dp,
        table,
        traj0,
        traj1,
        reference,
        phase,
    })
}

/// Runs circuit → spectrum → resonator → dynamics at `pp`.
pub fn run_pipeline(pp: &PhysicalParams, s: &RunSettings) -> Result<PointResult> {
    let ResonatorStage {
        dp,
        table,
        traj0,
        traj1,
        reference,
        phase,
    } = run_resonators(pp, s)?;
    let theta_ta = phase.diff_at(s.t_a);
    let amp0 = evolve_amplitudes(0, &dp, &table, &traj0, s.t_a, &s.evolve)?;
    let amp1 = evolve_amplitudes(1, &dp, &table, &traj1, s.t_a, &s.evolve)?;
    let fidelity0 = FidelityReport::new(&amp0, s.t_a, theta_ta)?;
    let fidelity1 = FidelityReport::new(&amp1, s.t_a, theta_ta)?;
    let extremes = cycle_extremes(&table, &traj0)?;
    Ok(PointResult {
        dp,
        table,
        traj0,
        traj1,
        reference,
        phase,
        fidelity0,
        fidelity1,
        extremes,
        amp0,
        amp1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureStatus {
    Ok,
    Failed,
}

/// One row of a sweep. Numeric fields are empty when the point failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: String,
    /// Swept value in the parameter's SI unit.
    pub value: f64,
    /// Mutual inductance of the row, H.
    pub m: f64,
    pub n_min: Option<usize>,
    pub n_max: Option<usize>,
    pub f_min: Option<f64>,
    pub f_max: Option<f64>,
    pub f0: Option<f64>,
    pub f1: Option<f64>,
    pub theta_ta: Option<f64>,
    pub rate: Option<f64>,
    pub status: FailureStatus,
    pub error: String,
}

impl SweepRow {
    fn failed(param: &str, value: f64, m: f64, e: &Error) -> Self {
        Self {
            param: param.to_string(),
            value,
            m,
            n_min: None,
            n_max: None,
            f_min: None,
            f_max: None,
            f0: None,
            f1: None,
            theta_ta: None,
            rate: None,
            status: FailureStatus::Failed,
            error: e.to_string(),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == FailureStatus::Ok
    }
}

/// [`run_pipeline`] folded into a row; errors are recorded, not raised.
pub fn run_point(pp: &PhysicalParams, s: &RunSettings, param: &str, value: f64) -> SweepRow {
    match run_pipeline(pp, s) {
        Ok(r) => SweepRow {
            param: param.to_string(),
            value,
            m: pp.m,
            n_min: Some(r.extremes.n_min),
            n_max: Some(r.extremes.n_max),
            f_min: Some(r.extremes.f_min),
            f_max: Some(r.extremes.f_max),
            f0: Some(r.fidelity0.fidelity),
            f1: Some(r.fidelity1.fidelity),
            theta_ta: Some(r.fidelity0.theta_at_ta),
            rate: Some(r.phase.rate),
            status: FailureStatus::Ok,
            error: String::new(),
        },
        Err(e) => SweepRow::failed(param, value, pp.m, &e),
    }
}

/// One row per `(value, M variant)`, values outermost. An empty `m_variants`
/// keeps the base M. `progress` is called after every row.
pub fn sweep<P: FnMut(usize, usize, &SweepRow)>(
    param: &str,
    values: &[f64],
    base: &PhysicalParams,
    m_variants: &[f64],
    s: &RunSettings,
    mut progress: P,
) -> Vec<SweepRow> {
    let ms: Vec<f64> = if m_variants.is_empty() {
        vec![base.m]
    } else {
        m_variants.to_vec()
    };
    let total = values.len() * ms.len();
    let mut rows = Vec::with_capacity(total);
    for &v in values {
        for &m in &ms {
            let mut pp = base.with_m(m);
            let row = match pp.set(param, v) {
                Ok(()) => run_point(&pp, s, param, v),
                Err(e) => SweepRow::failed(param, v, pp.m, &e),
            };
            progress(rows.len() + 1, total, &row);
            rows.push(row);
        }
    }
    rows
}

/// Relaxation time (ns) needed for a decay-limited fidelity `f1` over a
/// measurement of `t_m` ns. Infinite once the requirement exceeds 1e15 ns.
pub fn t1_requirement(f1: f64, t_m: f64) -> Result<f64> {
    if !(f1 > 0.0 && f1 < 1.0) {
        return Err(Error::FidelityOutOfRange(f1));
    }
    if !(t_m > 0.0) {
        return Err(Error::InvalidArgument(format!("t_m = {t_m} ns")));
    }
    let t1 = -t_m / (2.0 * f1.ln());
    Ok(if t1 > 1e15 { f64::INFINITY } else { t1 })
}

/// `exp(−t_m / 2T₁)`.
pub fn decay_adjusted_fidelity(t_m: f64, t1: f64) -> Result<f64> {
    if !(t1 > 0.0) {
        return Err(Error::InvalidArgument(format!("T1 = {t1} ns")));
    }
    Ok((-t_m / (2.0 * t1)).exp())
}

/// Required fidelities of the relaxation-time table.
pub const TABLE2_FIDELITIES: [f64; 7] = [0.8, 0.9, 0.95, 0.98, 0.99, 0.999, 0.9999];

/// `(F₁, T₁ in μs)` pairs for a measurement time `t_m` in ns.
pub fn table2(t_m: f64) -> Result<Vec<(f64, f64)>> {
    TABLE2_FIDELITIES
        .iter()
        .map(|&f| Ok((f, t1_requirement(f, t_m)? / 1e3)))
        .collect()
}

/// Rounds to two significant figures, printed without trailing exponent
/// noise (`0.22`, `5.0`, `500`).
pub fn two_significant(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (1 - magnitude).max(0) as usize;
    let scale = 10f64.powi(1 - magnitude);
    let rounded = (x * scale).round() / scale;
    format!("{rounded:.decimals$}")
}

/// Direction in which a parameter degrades F₁.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Increase,
    Decrease,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Increase => 1.0,
            Direction::Decrease => -1.0,
        }
    }
}

/// Parameters of the reproducibility table with their degrading direction.
pub const TABLE3_PARAMS: [(&str, Direction); 6] = [
    ("M", Direction::Increase),
    ("L", Direction::Decrease),
    ("C", Direction::Increase),
    ("I0", Direction::Decrease),
    ("Lr", Direction::Decrease),
    ("Cr", Direction::Decrease),
];

/// Largest deviation searched, percent.
pub const TARGET_SEARCH_LIMIT: i32 = 50;

/// Smallest whole-percent deviation of `param` in `direction` at which F₁
/// falls below `f1_required`, as a signed percentage. Points where the
/// pipeline fails (the well vanishes, levels collide) count as below the
/// threshold. Bisection on integers assumes a single crossing.
pub fn reproducibility_target<P: FnMut(i32, Option<f64>)>(
    param: &str,
    base: &PhysicalParams,
    f1_required: f64,
    direction: Direction,
    s: &RunSettings,
    mut progress: P,
) -> Result<i32> {
    let base_value = base.get(param)?;
    let mut f1_at = |percent: i32| -> Result<Option<f64>> {
        let mut pp = *base;
        pp.set(
            param,
            base_value * (1.0 + direction.sign() * percent as f64 / 100.0),
        )?;
        let f = match run_pipeline(&pp, s) {
            Ok(r) => Some(r.fidelity1.fidelity),
            Err(Error::InvalidArgument(m)) => return Err(Error::InvalidArgument(m)),
            Err(_) => None,
        };
        progress(percent, f);
        Ok(f)
    };
    let below = |f: Option<f64>| f.map_or(true, |f| f < f1_required);
    if below(f1_at(0)?) {
        return Ok(0);
    }
    if !below(f1_at(TARGET_SEARCH_LIMIT)?) {
        return Err(Error::NoCrossing {
            param: param.to_string(),
            threshold: f1_required,
        });
    }
    let (mut good, mut bad) = (0, TARGET_SEARCH_LIMIT);
    while bad - good > 1 {
        let mid = (good + bad) / 2;
        if below(f1_at(mid)?) {
            bad = mid;
        } else {
            good = mid;
        }
    }
    Ok(direction.sign() as i32 * bad)
}

/// Phase-noise budget of a measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyBudget {
    /// `(4⟨N⟩)^(−1/2)`, rad.
    pub quantum_phase_unc: f64,
    /// `2π(f_r/Q)t_m`, rad.
    pub q_factor_phase_unc: f64,
    /// `rate·t_m`, rad.
    pub required_accuracy: f64,
    pub margin_ok: bool,
}

/// `f_r` in GHz, `t_m` in ns, `rate` in rad/ns.
pub fn uncertainty_budget(n_quanta: f64, q: f64, f_r: f64, t_m: f64, rate: f64) -> Result<UncertaintyBudget> {
    for (name, v) in [("n_quanta", n_quanta), ("Q", q), ("f_r", f_r), ("t_m", t_m)] {
        if !(v > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "{name} must be positive, got {v}"
            )));
        }
    }
    let quantum = (4.0 * n_quanta).powf(-0.5);
    let width = 2.0 * std::f64::consts::PI * (f_r / q) * t_m;
    let required = rate * t_m;
    Ok(UncertaintyBudget {
        quantum_phase_unc: quantum,
        q_factor_phase_unc: width,
        required_accuracy: required,
        margin_ok: required > quantum && required > width,
    })
}

/// Evenly spaced values `base·(1 − span) … base·(1 + span)`.
pub fn relative_range(base: f64, span: f64, points: usize) -> Vec<f64> {
    if points < 2 {
        return vec![base];
    }
    (0..points)
        .map(|i| base * (1.0 - span + 2.0 * span * i as f64 / (points - 1) as f64))
        .collect()
}
