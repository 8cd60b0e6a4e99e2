// Copyright 2026 The qnd Authors
// SPDX-License-Identifier: Apache-2.0

//! Quasi-classical resonator driven by the adiabatic qubit response.
//!
//! The resonator sees the qubit only through `⟨δ⟩_n(φ_r)` of the occupied
//! level, so its motion is a one-dimensional conservative system with force
//! `−(E_J/Δ)[λφ_r − μ(⟨δ⟩_n − φ_p)]`. Trajectories are integrated with a
//! fourth-order symplectic composition scheme.

use serde::{Deserialize, Serialize};

use crate::circuit::{CanonicalState, DimensionlessParams, ResonatorState};
use crate::spectrum::{solve_levels, well_geometry, GridSpec};
use crate::spline::UniformSpline;
use crate::table::SpectralTable;
use crate::units::NS;
use crate::{Error, Result};

/// Yoshida's fourth-order drift and kick weights.
fn yoshida() -> ([f64; 4], [f64; 3]) {
    let cbrt2 = 2f64.powf(1.0 / 3.0);
    let w1 = 1.0 / (2.0 - cbrt2);
    let w0 = -cbrt2 / (2.0 - cbrt2);
    (
        [w1 / 2.0, (w0 + w1) / 2.0, (w0 + w1) / 2.0, w1 / 2.0],
        [w1, w0, w1],
    )
}

/// Adiabatic response `⟨δ⟩_n(φ_r)` of one level.
#[derive(Debug, Clone)]
pub struct ResponseCurve {
    pub n: usize,
    pub phi_r_samples: Vec<f64>,
    pub delta_avg_samples: Vec<f64>,
    spline: UniformSpline,
}

impl ResponseCurve {
    fn from_samples(n: usize, phi_r: Vec<f64>, delta: Vec<f64>) -> Self {
        let step = phi_r[1] - phi_r[0];
        let spline = UniformSpline::single(phi_r[0], step, delta.clone());
        Self {
            n,
            phi_r_samples: phi_r,
            delta_avg_samples: delta,
            spline,
        }
    }

    /// Response of level `n` read off a spectral table.
    pub fn from_table(table: &SpectralTable, n: usize) -> Result<Self> {
        if let Some(i) = table.n_left.iter().position(|&c| c <= n) {
            return Err(Error::LevelLost {
                level: n,
                phi_r: table.phi_r[i],
            });
        }
        Ok(Self::from_samples(
            n,
            table.phi_r.clone(),
            table.expected_delta_samples(n).to_vec(),
        ))
    }

    pub fn range(&self) -> (f64, f64) {
        (self.spline.x_min(), self.spline.x_max())
    }

    pub fn contains(&self, phi_r: f64) -> bool {
        let (lo, hi) = self.range();
        phi_r >= lo && phi_r <= hi
    }

    pub fn eval(&self, phi_r: f64) -> f64 {
        self.spline.eval(0, phi_r)
    }

    /// `∫⟨δ⟩ dφ_r` from the lower range end.
    pub fn integral(&self, phi_r: f64) -> f64 {
        self.spline.integral(0, phi_r)
    }
}

/// Tabulates `⟨δ⟩_n` on `[lo, hi]` with spacing at most `max_step` by direct
/// solves on a fixed grid of `spec.points`.
pub fn build_response_curve(
    n: usize,
    dp: &DimensionlessParams,
    lo: f64,
    hi: f64,
    max_step: f64,
    spec: &GridSpec,
) -> Result<ResponseCurve> {
    if !(hi > lo) || !(max_step > 0.0) {
        return Err(Error::InvalidArgument(format!("curve range [{lo}, {hi}]")));
    }
    let samples = (((hi - lo) / max_step).ceil() as usize + 1).max(4);
    let step = (hi - lo) / (samples - 1) as f64;
    let phi_r: Vec<f64> = (0..samples).map(|i| lo + step * i as f64).collect();
    let mut delta = Vec::with_capacity(samples);
    for &x in &phi_r {
        let s = solve_levels(x, dp, spec, n + 1)?;
        if s.n_left <= n {
            return Err(Error::LevelLost { level: n, phi_r: x });
        }
        delta.push(s.dipole(n, n));
    }
    Ok(ResponseCurve::from_samples(n, phi_r, delta))
}

/// Resonator response driving the flux: either a qubit level or none
/// (`⟨δ⟩ = φ_p`, the decoupled reference).
#[derive(Debug, Clone, Copy)]
pub enum Drive<'a> {
    Level(&'a ResponseCurve),
    Free,
}

impl Drive<'_> {
    fn delta(&self, phi_r: f64, dp: &DimensionlessParams) -> Result<f64> {
        match self {
            Drive::Level(c) => {
                if !c.contains(phi_r) {
                    let (lo, hi) = c.range();
                    return Err(Error::CurveRangeExceeded { phi_r, lo, hi });
                }
                Ok(c.eval(phi_r))
            }
            Drive::Free => Ok(dp.phi_p),
        }
    }

    /// `V_eff(φ_r)` in joules, zero at the curve's lower end for a level
    /// drive and at `φ_r = 0` for the free drive.
    pub fn potential(&self, phi_r: f64, dp: &DimensionlessParams) -> f64 {
        let scale = dp.e_j_joules() / dp.delta_cap;
        let response = match self {
            Drive::Level(c) => c.integral(phi_r) - dp.phi_p * phi_r,
            Drive::Free => 0.0,
        };
        scale * (0.5 * dp.lambda * phi_r * phi_r - dp.mu * response)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResonatorTrajectory {
    /// Occupied qubit level; `None` for the decoupled reference.
    pub n: Option<usize>,
    /// ns
    pub t: Vec<f64>,
    pub phi_r: Vec<f64>,
    /// J·s
    pub p_r: Vec<f64>,
    /// Unwrapped phase about the orbit centre, zero at `t = 0`.
    pub theta: Vec<f64>,
    /// Half the peak-to-peak flux swing.
    pub amplitude: f64,
    /// Midpoint of the flux extremes.
    pub center: f64,
}

impl ResonatorTrajectory {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.t[1] - self.t[0]
    }

    /// Flux extremes `(min, max)`.
    pub fn flux_extremes(&self) -> (f64, f64) {
        self.phi_r
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
                (a.min(x), b.max(x))
            })
    }
}

/// Integrates the resonator from `initial` over `[0, t_end]` with a step no
/// larger than `dt` (ns). Every step is recorded.
pub fn integrate_resonator(
    n: Option<usize>,
    dp: &DimensionlessParams,
    drive: Drive<'_>,
    initial: ResonatorState,
    t_end: f64,
    dt: f64,
) -> Result<ResonatorTrajectory> {
    if !(t_end > 0.0) || !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("t_end {t_end} ns, dt {dt} ns")));
    }
    let steps = (t_end / dt).ceil() as usize;
    let h = t_end / steps as f64;
    let (drift, kick) = yoshida();
    let scale = dp.e_j_joules() / dp.delta_cap;
    let force = |x: f64| -> Result<f64> {
        let d = drive.delta(x, dp)?;
        Ok(-scale * (dp.lambda * x - dp.mu * (d - dp.phi_p)))
    };
    let mut t = Vec::with_capacity(steps + 1);
    let mut phi = Vec::with_capacity(steps + 1);
    let mut p = Vec::with_capacity(steps + 1);
    let (mut x, mut px) = (initial.phi_r, initial.p_r);
    drive.delta(x, dp)?;
    t.push(0.0);
    phi.push(x);
    p.push(px);
    for i in 1..=steps {
        for j in 0..4 {
            x += drift[j] * h * px / dp.m_r * NS;
            if j < 3 {
                px += kick[j] * h * force(x)? * NS;
            }
        }
        t.push(h * i as f64);
        phi.push(x);
        p.push(px);
    }
    let (theta, center, amplitude) = extract_phase(&phi, &p, dp.m_r, dp.omega_ref())?;
    Ok(ResonatorTrajectory {
        n,
        t,
        phi_r: phi,
        p_r: p,
        theta,
        amplitude,
        center,
    })
}

/// Decoupled run (M = 0) sharing the initial condition: the phase reference.
pub fn reference_trajectory(
    dp: &DimensionlessParams,
    initial: ResonatorState,
    t_end: f64,
    dt: f64,
) -> Result<ResonatorTrajectory> {
    let free = DimensionlessParams {
        mu: 0.0,
        delta_cap: dp.lambda * dp.lambda_r,
        ..*dp
    };
    integrate_resonator(None, &free, Drive::Free, initial, t_end, dt)
}

/// `p_r²/2m_r + V_eff(φ_r)` in joules.
pub fn effective_energy(dp: &DimensionlessParams, drive: Drive<'_>, phi_r: f64, p_r: f64) -> f64 {
    p_r * p_r / (2.0 * dp.m_r) + drive.potential(phi_r, dp)
}

/// Unwrapped quadrature phase `atan2(ω·m_r·(φ_r − c), p_r)` about the orbit
/// centre `c`, re-zeroed at the first sample. Returns `(θ, c, amplitude)`;
/// `omega_ref` is in rad/ns.
pub fn extract_phase(phi_r: &[f64], p_r: &[f64], m_r: f64, omega_ref: f64) -> Result<(Vec<f64>, f64, f64)> {
    if phi_r.len() != p_r.len() || phi_r.is_empty() {
        return Err(Error::GridMismatch);
    }
    let (lo, hi) = phi_r
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
            (a.min(x), b.max(x))
        });
    let center = 0.5 * (lo + hi);
    let amplitude = 0.5 * (hi - lo);
    if amplitude == 0.0 && p_r.iter().all(|&p| p == 0.0) {
        return Err(Error::DegenerateTrajectory);
    }
    let w = omega_ref / NS * m_r;
    let mut theta = Vec::with_capacity(phi_r.len());
    let mut offset = 0.0;
    let mut prev = 0.0;
    for (i, (&x, &p)) in phi_r.iter().zip(p_r).enumerate() {
        let raw = (w * (x - center)).atan2(p);
        if i > 0 {
            let jump = raw - prev;
            if jump > std::f64::consts::PI {
                offset -= 2.0 * std::f64::consts::PI;
            } else if jump < -std::f64::consts::PI {
                offset += 2.0 * std::f64::consts::PI;
            }
        }
        prev = raw;
        theta.push(raw + offset);
    }
    let start = theta[0];
    theta.iter_mut().for_each(|x| *x -= start);
    Ok((theta, center, amplitude))
}

/// Least-squares line `y ≈ slope·x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Phase shifts of both qubit states against the reference and their
/// difference.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseObservables {
    pub t: Vec<f64>,
    pub shift0: Vec<f64>,
    pub shift1: Vec<f64>,
    pub diff: Vec<f64>,
    /// Least-squares slope of `diff`, rad/ns.
    pub rate: f64,
}

impl PhaseObservables {
    /// `θ₀ − θ₁` at time `t`, linearly interpolated.
    pub fn diff_at(&self, t: f64) -> f64 {
        interpolate(&self.t, &self.diff, t)
    }
}

fn interpolate(t: &[f64], y: &[f64], at: f64) -> f64 {
    let i = t.partition_point(|&x| x <= at).clamp(1, t.len() - 1);
    let w = (at - t[i - 1]) / (t[i] - t[i - 1]);
    y[i - 1] + w * (y[i] - y[i - 1])
}

pub fn phase_observables(
    traj0: &ResonatorTrajectory,
    traj1: &ResonatorTrajectory,
    reference: &ResonatorTrajectory,
) -> Result<PhaseObservables> {
    if traj0.t != traj1.t || traj0.t != reference.t {
        return Err(Error::GridMismatch);
    }
    let shift = |tr: &ResonatorTrajectory| -> Vec<f64> {
        tr.theta
            .iter()
            .zip(&reference.theta)
            .map(|(a, b)| a - b)
            .collect()
    };
    let shift0 = shift(traj0);
    let shift1 = shift(traj1);
    let diff: Vec<f64> = traj0.theta.iter().zip(&traj1.theta).map(|(a, b)| a - b).collect();
    let (rate, _) = linear_fit(&traj0.t, &diff);
    Ok(PhaseObservables {
        t: traj0.t.clone(),
        shift0,
        shift1,
        diff,
        rate,
    })
}

/// Oscillation frequency (GHz) from upward zero crossings of `p_r`.
pub fn dressed_frequency(traj: &ResonatorTrajectory) -> Option<f64> {
    let mut crossings = Vec::new();
    for i in 1..traj.len() {
        let (a, b) = (traj.p_r[i - 1], traj.p_r[i]);
        if a < 0.0 && b >= 0.0 {
            let w = -a / (b - a);
            crossings.push(traj.t[i - 1] + w * (traj.t[i] - traj.t[i - 1]));
        }
    }
    if crossings.len() < 2 {
        return None;
    }
    let index: Vec<f64> = (0..crossings.len()).map(|i| i as f64).collect();
    let (period, _) = linear_fit(&index, &crossings);
    Some(1.0 / period)
}

/// Flux range visited by the resonator when the qubit response is replaced
/// by the classical left-well minimum. Walks outwards from `φ_r = 0` until
/// the effective potential exceeds the initial kinetic energy, or the well
/// vanishes.
pub fn estimate_flux_range(dp: &DimensionlessParams, initial: ResonatorState) -> Result<(f64, f64)> {
    let kinetic = initial.p_r * initial.p_r / (2.0 * dp.m_r);
    let scale = dp.e_j_joules() / dp.delta_cap;
    let response = |x: f64| -> Option<f64> { well_geometry(x, dp).ok().map(|g| g.delta_left_min - dp.phi_p) };
    let start = response(initial.phi_r).ok_or(Error::WellVanished { phi_r: initial.phi_r })?;
    let walk = |dir: f64| -> f64 {
        let h = 0.01 * dir;
        let mut x = initial.phi_r;
        let mut v = 0.0;
        let mut r_prev = start;
        for _ in 0..100_000 {
            let next = x + h;
            let Some(r) = response(next) else {
                return next;
            };
            let integral = 0.5 * h * (r + r_prev);
            v += scale * (0.5 * dp.lambda * (next * next - x * x) - dp.mu * integral);
            x = next;
            r_prev = r;
            if v >= kinetic {
                return x;
            }
        }
        x
    };
    Ok((walk(-1.0), walk(1.0)))
}

/// Full classical Hamiltonian of the coupled circuit, J.
pub fn classical_hamiltonian(dp: &DimensionlessParams, s: &CanonicalState) -> f64 {
    let d = dp.delta_cap;
    let dq = s.delta - dp.phi_p;
    s.p_r * s.p_r / (2.0 * dp.m_r)
        + s.p * s.p / (2.0 * dp.m)
        + dp.e_j_joules()
            * ((dp.lambda / (2.0 * d)) * s.phi_r * s.phi_r + (dp.lambda_r / (2.0 * d)) * dq * dq
                - s.delta.cos()
                - (dp.mu / d) * s.phi_r * dq)
}

/// Time series of the four canonical variables.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassicalSeries {
    pub t: Vec<f64>,
    pub states: Vec<CanonicalState>,
}

/// Integrates the full classical circuit with the same symplectic scheme,
/// recording every `stride`-th step.
pub fn integrate_full_classical(
    dp: &DimensionlessParams,
    initial: CanonicalState,
    t_end: f64,
    dt: f64,
    stride: usize,
) -> Result<ClassicalSeries> {
    if !(t_end > 0.0) || !(dt > 0.0) || stride == 0 {
        return Err(Error::InvalidArgument(format!("t_end {t_end} ns, dt {dt} ns")));
    }
    let steps = (t_end / dt).ceil() as usize;
    let h = t_end / steps as f64;
    let (drift, kick) = yoshida();
    let ej = dp.e_j_joules();
    let d = dp.delta_cap;
    let mut s = initial;
    let mut t = vec![0.0];
    let mut states = vec![s];
    for i in 1..=steps {
        for j in 0..4 {
            s.phi_r += drift[j] * h * s.p_r / dp.m_r * NS;
            s.delta += drift[j] * h * s.p / dp.m * NS;
            if j < 3 {
                let dq = s.delta - dp.phi_p;
                let f_r = -(ej / d) * (dp.lambda * s.phi_r - dp.mu * dq);
                let f_q = -ej * (s.delta.sin() + (dp.lambda_r / d) * dq - (dp.mu / d) * s.phi_r);
                s.p_r += kick[j] * h * f_r * NS;
                s.p += kick[j] * h * f_q * NS;
            }
        }
        if i % stride == 0 || i == steps {
            t.push(h * i as f64);
            states.push(s);
        }
    }
    Ok(ClassicalSeries { t, states })
}
