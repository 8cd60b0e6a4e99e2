// Copyright 2026 The qnd Authors
// SPDX-License-Identifier: Apache-2.0

//! Qubit amplitudes in the moving eigenbasis.
//!
//! The state is expanded as `ψ = Σ C_m ψ_m(φ_r(t)) e^{−iθ_m}` with
//! `θ̇_m = 2πE_m`. In this interaction picture
//!
//! ```text
//! Ċ_k = −Σ_{m≠k} C_m e^{i(θ_k − θ_m)} ⟨ψ_k|∂_t ψ_m⟩,
//! ⟨ψ_k|∂_t ψ_m⟩ = g·⟨ψ_k|δ|ψ_m⟩·φ̇_r / (E_m − E_k),
//! ```
//!
//! with `g = −E_J μ/Δ` the derivative of the qubit Hamiltonian with respect
//! to `φ_r` per unit `δ`. The resonator path is prescribed by a
//! [`ResonatorTrajectory`] and the spectrum by a [`SpectralTable`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::DimensionlessParams;
use crate::resonator::ResonatorTrajectory;
use crate::spectrum::{Grid, InstantSpectrum};
use crate::table::{SpectralTable, TableSample};
use crate::{Error, Result};

use std::f64::consts::PI;

/// Population below which a level is considered unoccupied.
pub const TAIL_THRESHOLD: f64 = 1e-8;
/// Smallest admissible gap between active levels, in units of `E₁ − E₀`.
pub const DEGENERACY_GUARD: f64 = 0.05;
/// Steps per period of the fastest Bohr frequency.
pub const STEPS_PER_BOHR_PERIOD: f64 = 20.0;
/// Acceptance of the step-halving check on final `|C|`.
pub const STEP_HALVING_LIMIT: f64 = 1e-6;

/// Non-adiabatic couplings `⟨ψ_k|∂_t ψ_m⟩` (1/ns) among the left-well levels
/// of `spec` for a flux velocity `phi_r_dot` (1/ns).
pub fn nonadiabatic_couplings(
    spec: &InstantSpectrum,
    dp: &DimensionlessParams,
    phi_r_dot: f64,
) -> Result<Vec<Vec<f64>>> {
    let n = spec.n_left.min(spec.energies.len());
    if n < 2 {
        return Err(Error::NotAQubit { n_left: n });
    }
    let guard = DEGENERACY_GUARD * (spec.energies[1] - spec.energies[0]);
    if let Some((k, gap)) = spec.min_gap(n) {
        if gap < guard {
            return Err(Error::NearDegeneracy {
                k,
                m: k + 1,
                gap,
                guard,
            });
        }
    }
    let g = dp.coupling();
    let mut out = vec![vec![0.0; n]; n];
    for k in 0..n {
        for m in 0..n {
            if k != m {
                out[k][m] = g * spec.dipole(k, m) * phi_r_dot / (spec.energies[m] - spec.energies[k]);
            }
        }
    }
    Ok(out)
}

/// A level leaving the left well and the population dropped with it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationEvent {
    /// ns
    pub t: f64,
    pub level: usize,
    pub lost: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AmplitudeTrajectory {
    pub n0: usize,
    /// ns
    pub t: Vec<f64>,
    /// Resonator flux at each sample.
    pub phi_r: Vec<f64>,
    /// Interaction-picture amplitudes, `levels` per sample.
    pub c: Vec<Vec<Complex64>>,
    /// `1 + max{k : |C_k|² ≥ 1e-8}` at each sample.
    pub k: Vec<usize>,
    pub norm: Vec<f64>,
    /// `θ_m = 2π∫E_m dt` at each sample, radians.
    pub phase_integrals: Vec<Vec<f64>>,
    pub truncation_events: Vec<TruncationEvent>,
    /// Step actually used, ns.
    pub dt: f64,
}

impl AmplitudeTrajectory {
    /// Final populations `|C_m|²`.
    pub fn final_populations(&self) -> Vec<f64> {
        self.c
            .last()
            .map_or_else(Vec::new, |c| c.iter().map(|z| z.norm_sqr()).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolveOptions {
    /// Upper bound on the step, ns.
    pub dt: f64,
    /// Re-run at half the step and compare final `|C|`.
    pub check_step: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            check_step: true,
        }
    }
}

/// Cubic Hermite interpolation of a recorded resonator path.
pub(crate) struct FluxPath<'a> {
    traj: &'a ResonatorTrajectory,
    rate_scale: f64,
    h: f64,
}

impl<'a> FluxPath<'a> {
    pub(crate) fn new(traj: &'a ResonatorTrajectory, dp: &DimensionlessParams) -> Self {
        Self {
            traj,
            rate_scale: dp.phi_r_rate(1.0),
            h: traj.step(),
        }
    }

    /// `(φ_r, φ̇_r)` at `t`.
    pub(crate) fn at(&self, t: f64) -> (f64, f64) {
        let n = self.traj.len();
        let i = ((t / self.h).floor().max(0.0) as usize).min(n - 2);
        let h = self.traj.t[i + 1] - self.traj.t[i];
        let s = (t - self.traj.t[i]) / h;
        let (y0, y1) = (self.traj.phi_r[i], self.traj.phi_r[i + 1]);
        let m0 = self.traj.p_r[i] * self.rate_scale * h;
        let m1 = self.traj.p_r[i + 1] * self.rate_scale * h;
        let s2 = s * s;
        let s3 = s2 * s;
        let y = (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * m0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * m1;
        let dy = ((6.0 * s2 - 6.0 * s) * y0
            + (3.0 * s2 - 4.0 * s + 1.0) * m0
            + (-6.0 * s2 + 6.0 * s) * y1
            + (3.0 * s2 - 2.0 * s) * m1)
            / h;
        (y, dy)
    }
}

struct Stepper<'a> {
    table: &'a SpectralTable,
    path: FluxPath<'a>,
    g: f64,
    sample: TableSample,
    scratch: Vec<f64>,
    rotor: Vec<Complex64>,
}

impl Stepper<'_> {
    /// Derivatives of the first `active` amplitudes and of all phases.
    fn deriv(
        &mut self,
        t: f64,
        c: &[Complex64],
        theta: &[f64],
        active: usize,
        dc: &mut [Complex64],
        dtheta: &mut [f64],
    ) -> Result<()> {
        let (phi, phi_dot) = self.path.at(t);
        if !self.table.contains(phi) {
            let (lo, hi) = self.table.range();
            return Err(Error::CurveRangeExceeded { phi_r: phi, lo, hi });
        }
        self.table.sample_into(phi, &mut self.sample, &mut self.scratch);
        let e = &self.sample.energies;
        let l = e.len();
        for m in 0..l {
            dtheta[m] = 2.0 * PI * e[m];
        }
        for m in 0..active {
            self.rotor[m] = Complex64::from_polar(1.0, theta[m]);
        }
        for k in 0..active {
            let mut acc = Complex64::new(0.0, 0.0);
            for m in 0..active {
                if m == k || c[m] == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let a = self.g * self.sample.dipole[k * l + m] * phi_dot / (e[m] - e[k]);
                acc += c[m] * self.rotor[k] * self.rotor[m].conj() * a;
            }
            dc[k] = -acc;
        }
        for z in dc.iter_mut().skip(active) {
            *z = Complex64::new(0.0, 0.0);
        }
        Ok(())
    }
}

fn reported_k(c: &[Complex64]) -> usize {
    c.iter()
        .rposition(|z| z.norm_sqr() >= TAIL_THRESHOLD)
        .map_or(0, |k| k + 1)
}

/// Largest Bohr frequency `E_{L−1} − E_0` over the table samples, GHz.
fn max_bohr_frequency(table: &SpectralTable) -> f64 {
    table
        .phi_r
        .iter()
        .map(|&x| table.energy(table.levels - 1, x) - table.energy(0, x))
        .fold(0.0, f64::max)
}

/// `dt` capped at 1/20 of the shortest Bohr period of the stored levels.
pub fn step_bound(table: &SpectralTable, dt: f64) -> f64 {
    let bohr = max_bohr_frequency(table);
    if bohr > 0.0 {
        dt.min(1.0 / (STEPS_PER_BOHR_PERIOD * bohr))
    } else {
        dt
    }
}

/// Evolves `C` from `C_{n0}(0) = 1` over `[0, t_end]` along `traj`.
///
/// Every stored level below the barrier is evolved; the reported count `K`
/// follows the tail condition. A level crossing above the barrier has its
/// amplitude zeroed and drops out of the basis until it returns; the rest is
/// not renormalised.
pub fn evolve_amplitudes(
    n0: usize,
    dp: &DimensionlessParams,
    table: &SpectralTable,
    traj: &ResonatorTrajectory,
    t_end: f64,
    opts: &EvolveOptions,
) -> Result<AmplitudeTrajectory> {
    let run = evolve_fixed(n0, dp, table, traj, t_end, step_bound(table, opts.dt))?;
    if opts.check_step {
        let half = evolve_fixed(n0, dp, table, traj, t_end, 0.5 * run.dt)?;
        let a = run.c.last().expect("non-empty");
        let b = half.c.last().expect("non-empty");
        let deviation = a
            .iter()
            .zip(b)
            .map(|(x, y)| (x.norm() - y.norm()).abs())
            .fold(0.0, f64::max);
        if deviation > STEP_HALVING_LIMIT {
            return Err(Error::StepTooCoarse {
                deviation,
                limit: STEP_HALVING_LIMIT,
            });
        }
    }
    Ok(run)
}

/// Fixed-step RK4 run with step at most `dt`, no halving check.
pub fn evolve_fixed(
    n0: usize,
    dp: &DimensionlessParams,
    table: &SpectralTable,
    traj: &ResonatorTrajectory,
    t_end: f64,
    dt: f64,
) -> Result<AmplitudeTrajectory> {
    let l = table.levels;
    if n0 >= l {
        return Err(Error::LevelIndex { index: n0, n_left: l });
    }
    let t_max = *traj.t.last().unwrap_or(&0.0);
    if !(t_end > 0.0) || t_end > t_max + 1e-12 {
        return Err(Error::WindowExceedsSeries {
            t_a: t_end,
            t_end: t_max,
        });
    }
    let steps = (t_end / dt).ceil() as usize;
    let h = t_end / steps as f64;
    let mut st = Stepper {
        table,
        path: FluxPath::new(traj, dp),
        g: dp.coupling(),
        sample: table.sample(0.0_f64.max(table.range().0)),
        scratch: Vec::new(),
        rotor: vec![Complex64::new(0.0, 0.0); l],
    };
    let zero = Complex64::new(0.0, 0.0);
    let mut c = vec![zero; l];
    c[n0] = Complex64::new(1.0, 0.0);
    let mut theta = vec![0.0; l];

    let mut out = AmplitudeTrajectory {
        n0,
        t: Vec::with_capacity(steps + 1),
        phi_r: Vec::with_capacity(steps + 1),
        c: Vec::with_capacity(steps + 1),
        k: Vec::with_capacity(steps + 1),
        norm: Vec::with_capacity(steps + 1),
        phase_integrals: Vec::with_capacity(steps + 1),
        truncation_events: Vec::new(),
        dt: h,
    };
    let record = |out: &mut AmplitudeTrajectory, t: f64, phi: f64, c: &[Complex64], th: &[f64]| {
        out.t.push(t);
        out.phi_r.push(phi);
        out.c.push(c.to_vec());
        out.k.push(reported_k(c));
        out.norm.push(c.iter().map(|z| z.norm_sqr()).sum());
        out.phase_integrals.push(th.to_vec());
    };
    let (phi0, _) = st.path.at(0.0);
    record(&mut out, 0.0, phi0, &c, &theta);

    let mut rk = Rk4::new(l);
    // Levels at or above the barrier leave the basis: their amplitude is
    // dropped once, at the crossing time, and they stay out until they
    // return. Steps are split at crossings so the loss does not depend on
    // where the step grid happens to fall.
    let mut n_left = table.n_left_at(phi0);
    for i in 0..steps {
        let t_next = h * (i + 1) as f64;
        let mut t = h * i as f64;
        check_gaps(&st, t, n_left)?;
        loop {
            let n_end = table.n_left_at(st.path.at(t_next).0);
            if n_end == n_left {
                rk.step(&mut st, t, t_next - t, n_left, &mut c, &mut theta)?;
                break;
            }
            let (mut lo, mut hi) = (t, t_next);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if table.n_left_at(st.path.at(mid).0) == n_left {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            rk.step(&mut st, t, hi - t, n_left, &mut c, &mut theta)?;
            t = hi;
            n_left = table.n_left_at(st.path.at(t).0);
            for (k, z) in c.iter_mut().enumerate().skip(n_left) {
                if *z != zero {
                    out.truncation_events.push(TruncationEvent {
                        t,
                        level: k,
                        lost: z.norm_sqr(),
                    });
                    *z = zero;
                }
            }
        }
        let (phi, _) = st.path.at(t_next);
        record(&mut out, t_next, phi, &c, &theta);
    }
    Ok(out)
}

/// Classical fourth-order Runge–Kutta with preallocated stages.
struct Rk4 {
    k: [(Vec<Complex64>, Vec<f64>); 4],
    ct: Vec<Complex64>,
    tht: Vec<f64>,
}

impl Rk4 {
    fn new(l: usize) -> Self {
        let stage = || (vec![Complex64::new(0.0, 0.0); l], vec![0.0; l]);
        Self {
            k: [stage(), stage(), stage(), stage()],
            ct: vec![Complex64::new(0.0, 0.0); l],
            tht: vec![0.0; l],
        }
    }

    fn step(
        &mut self,
        st: &mut Stepper<'_>,
        t: f64,
        h: f64,
        evolving: usize,
        c: &mut [Complex64],
        theta: &mut [f64],
    ) -> Result<()> {
        if h <= 0.0 {
            return Ok(());
        }
        let l = c.len();
        let [k1, k2, k3, k4] = &mut self.k;
        st.deriv(t, c, theta, evolving, &mut k1.0, &mut k1.1)?;
        for m in 0..l {
            self.ct[m] = c[m] + k1.0[m] * (0.5 * h);
            self.tht[m] = theta[m] + k1.1[m] * (0.5 * h);
        }
        st.deriv(t + 0.5 * h, &self.ct, &self.tht, evolving, &mut k2.0, &mut k2.1)?;
        for m in 0..l {
            self.ct[m] = c[m] + k2.0[m] * (0.5 * h);
            self.tht[m] = theta[m] + k2.1[m] * (0.5 * h);
        }
        st.deriv(t + 0.5 * h, &self.ct, &self.tht, evolving, &mut k3.0, &mut k3.1)?;
        for m in 0..l {
            self.ct[m] = c[m] + k3.0[m] * h;
            self.tht[m] = theta[m] + k3.1[m] * h;
        }
        st.deriv(t + h, &self.ct, &self.tht, evolving, &mut k4.0, &mut k4.1)?;
        for m in 0..l {
            c[m] += (k1.0[m] + k2.0[m] * 2.0 + k3.0[m] * 2.0 + k4.0[m]) * (h / 6.0);
            theta[m] += (k1.1[m] + 2.0 * k2.1[m] + 2.0 * k3.1[m] + k4.1[m]) * (h / 6.0);
        }
        Ok(())
    }
}

fn check_gaps(st: &Stepper<'_>, t: f64, active: usize) -> Result<()> {
    let (phi, _) = st.path.at(t);
    let e: Vec<f64> = (0..active).map(|k| st.table.energy(k, phi)).collect();
    if e.len() < 2 {
        return Ok(());
    }
    let guard = DEGENERACY_GUARD * (e[1] - e[0]);
    for k in 1..e.len() {
        let gap = e[k] - e[k - 1];
        if gap < guard {
            return Err(Error::NearDegeneracy {
                k: k - 1,
                m: k,
                gap,
                guard,
            });
        }
    }
    Ok(())
}

/// `f(t) = |C_{n0}(t)|`.
pub fn instantaneous_fidelity(amp: &AmplitudeTrajectory) -> Vec<f64> {
    amp.c.iter().map(|c| c[amp.n0].norm()).collect()
}

/// Trapezoidal mean of `f` over `[0, t_a]`, interpolating the last partial
/// interval.
pub fn averaged_fidelity(t: &[f64], f: &[f64], t_a: f64) -> Result<f64> {
    let t_end = *t.last().unwrap_or(&0.0);
    if !(t_a > 0.0) || t_a > t_end + 1e-9 || t.len() != f.len() {
        return Err(Error::WindowExceedsSeries { t_a, t_end });
    }
    let mut acc = 0.0;
    for i in 1..t.len() {
        if t[i - 1] >= t_a {
            break;
        }
        let (t0, f0) = (t[i - 1], f[i - 1]);
        let (mut t1, mut f1) = (t[i], f[i]);
        if t1 > t_a {
            f1 = f0 + (f1 - f0) * (t_a - t0) / (t1 - t0);
            t1 = t_a;
        }
        acc += 0.5 * (f0 + f1) * (t1 - t0);
    }
    Ok(acc / t_a)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FidelityReport {
    pub n0: usize,
    pub t: Vec<f64>,
    pub f_t: Vec<f64>,
    #[serde(rename = "F")]
    pub fidelity: f64,
    pub t_a: f64,
    /// `θ₀ − θ₁` at `t_a`, radians.
    pub theta_at_ta: f64,
    pub truncation_events: Vec<TruncationEvent>,
}

impl FidelityReport {
    pub fn new(amp: &AmplitudeTrajectory, t_a: f64, theta_at_ta: f64) -> Result<Self> {
        let f_t = instantaneous_fidelity(amp);
        let fidelity = averaged_fidelity(&amp.t, &f_t, t_a)?;
        Ok(Self {
            n0: amp.n0,
            t: amp.t.clone(),
            f_t,
            fidelity,
            t_a,
            theta_at_ta,
            truncation_events: amp.truncation_events.clone(),
        })
    }
}

/// `ψ(δ) = Σ C_m ψ_m(δ) e^{−iθ_m}` sampled on `target`, with `ψ_m` taken
/// from `spec` and interpolated linearly.
pub fn reconstruct_state(
    c: &[Complex64],
    theta: &[f64],
    spec: &InstantSpectrum,
    target: &Grid,
) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); target.count];
    let levels = c.len().min(spec.wavefunctions.len());
    for m in 0..levels {
        if c[m] == Complex64::new(0.0, 0.0) {
            continue;
        }
        let w = c[m] * Complex64::from_polar(1.0, -theta[m]);
        for (i, z) in out.iter_mut().enumerate() {
            *z += w * spec.grid.interpolate(&spec.wavefunctions[m], target.x(i));
        }
    }
    out
}
