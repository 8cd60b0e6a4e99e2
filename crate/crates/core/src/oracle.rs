// Copyright 2026 The qnd Authors
// SPDX-License-Identifier: Apache-2.0

//! Direct propagation of `iψ̇ = 2π·H_q(φ_r(t))ψ` on a fixed δ-grid by Strang
//! splitting: exact half-kicks in the potential around a Crank–Nicolson step
//! of the kinetic term. Used to check the moving-basis amplitudes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::DimensionlessParams;
use crate::dynamics::{evolve_fixed, reconstruct_state, step_bound, AmplitudeTrajectory, FluxPath};
use crate::linalg::thomas_solve_complex;
use crate::resonator::ResonatorTrajectory;
use crate::spectrum::{left_well_domain, potential, solve_levels, well_geometry, Grid, GridSpec};
use crate::table::SpectralTable;
use crate::{Error, Result};

use std::f64::consts::PI;

/// Wavefunction snapshots of a split-step run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleRun {
    pub grid: Grid,
    /// Snapshot times, ns.
    pub t: Vec<f64>,
    pub psi: Vec<Vec<Complex64>>,
    pub norm: Vec<f64>,
}

/// Union of the left-well domains met along the path up to `t_end`.
pub fn oracle_domain(dp: &DimensionlessParams, traj: &ResonatorTrajectory, t_end: f64) -> Result<(f64, f64)> {
    let path = FluxPath::new(traj, dp);
    let probes = 64;
    let mut a = f64::INFINITY;
    let mut b = f64::NEG_INFINITY;
    for j in 0..=probes {
        let (phi, _) = path.at(t_end * j as f64 / probes as f64);
        let g = well_geometry(phi, dp)?;
        let (lo, hi) = left_well_domain(phi, dp, &g);
        a = a.min(lo);
        b = b.max(hi);
    }
    Ok((a, b))
}

/// Propagator for a fixed grid.
pub struct SplitStep<'a> {
    dp: &'a DimensionlessParams,
    pub grid: Grid,
    psi: Vec<Complex64>,
    diag: Vec<Complex64>,
    rhs: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl<'a> SplitStep<'a> {
    pub fn new(dp: &'a DimensionlessParams, grid: Grid, psi: Vec<Complex64>) -> Self {
        let n = grid.count;
        Self {
            dp,
            grid,
            psi,
            diag: vec![Complex64::new(0.0, 0.0); n],
            rhs: vec![Complex64::new(0.0, 0.0); n],
            scratch: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn state(&self) -> &[Complex64] {
        &self.psi
    }

    pub fn norm(&self) -> f64 {
        self.psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.step
    }

    fn kick(&mut self, phi_r: f64, dt: f64) {
        for (i, z) in self.psi.iter_mut().enumerate() {
            let v = potential(self.grid.x(i), phi_r, self.dp);
            *z *= Complex64::from_polar(1.0, -2.0 * PI * v * dt);
        }
    }

    /// `(1 + iπT·dt)ψ' = (1 − iπT·dt)ψ` with `T` the kinetic matrix in GHz.
    fn drift(&mut self, dt: f64) {
        let k = self.dp.kinetic / (self.grid.step * self.grid.step);
        let a = Complex64::new(0.0, PI * dt);
        let n = self.grid.count;
        let off = a * (-k);
        for i in 0..n {
            let mut t = 2.0 * k * self.psi[i];
            if i > 0 {
                t -= k * self.psi[i - 1];
            }
            if i + 1 < n {
                t -= k * self.psi[i + 1];
            }
            self.rhs[i] = self.psi[i] - a * t;
            self.diag[i] = Complex64::new(1.0, 0.0) + a * (2.0 * k);
        }
        thomas_solve_complex(off, &self.diag, &mut self.rhs, &mut self.scratch);
        std::mem::swap(&mut self.psi, &mut self.rhs);
    }

    /// One Strang step from `t` with a flux `phi_at` as a function of time.
    pub fn step<F: Fn(f64) -> f64>(&mut self, phi_at: &F, t: f64, dt: f64) {
        self.kick(phi_at(t), 0.5 * dt);
        self.drift(dt);
        self.kick(phi_at(t + dt), 0.5 * dt);
    }
}

/// Propagates `ψ_{n0}(φ_r(0))` along `traj` up to `t_end` with steps of at
/// most `dt` on `points` grid points, recording `snapshots + 1` evenly spaced
/// states.
pub fn splitstep_oracle(
    n0: usize,
    dp: &DimensionlessParams,
    traj: &ResonatorTrajectory,
    t_end: f64,
    dt: f64,
    points: usize,
    snapshots: usize,
) -> Result<OracleRun> {
    if !(t_end > 0.0) || !(dt > 0.0) || snapshots == 0 {
        return Err(Error::InvalidArgument(format!("t_end {t_end} ns, dt {dt} ns")));
    }
    let (a, b) = oracle_domain(dp, traj, t_end)?;
    let grid = Grid::interior(a, b, points);
    let path = FluxPath::new(traj, dp);
    let phi_at = |t: f64| path.at(t).0;

    let start = solve_levels(phi_at(0.0), dp, &GridSpec::fixed(points), n0 + 1)?;
    let mut psi: Vec<Complex64> = (0..grid.count)
        .map(|i| Complex64::new(start.grid.interpolate(&start.wavefunctions[n0], grid.x(i)), 0.0))
        .collect();
    let norm = (psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.step).sqrt();
    psi.iter_mut().for_each(|z| *z /= norm);

    let mut prop = SplitStep::new(dp, grid, psi);
    let mut run = OracleRun {
        grid,
        t: vec![0.0],
        psi: vec![prop.state().to_vec()],
        norm: vec![prop.norm()],
    };
    let segment = t_end / snapshots as f64;
    let sub = (segment / dt).ceil() as usize;
    let h = segment / sub as f64;
    for s in 0..snapshots {
        let t0 = segment * s as f64;
        for j in 0..sub {
            prop.step(&phi_at, t0 + h * j as f64, h);
        }
        run.t.push(segment * (s + 1) as f64);
        run.psi.push(prop.state().to_vec());
        run.norm.push(prop.norm());
    }
    Ok(run)
}

/// `|⟨a|b⟩| / (‖a‖‖b‖)` on a common grid.
pub fn normalized_overlap(a: &[Complex64], b: &[Complex64]) -> f64 {
    let dot: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let na: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    let nb: f64 = b.iter().map(|z| z.norm_sqr()).sum();
    dot.norm() / (na * nb).sqrt()
}

/// Overlap between the split-step snapshots and the moving-basis state
/// rebuilt from `amp`, at each snapshot time. Basis functions come from
/// direct solves on `points` grid points.
pub fn compare_with_amplitudes(
    dp: &DimensionlessParams,
    run: &OracleRun,
    amp: &AmplitudeTrajectory,
    points: usize,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(run.t.len());
    for (t, psi) in run.t.iter().zip(&run.psi) {
        let i = amp.t.partition_point(|&x| x < *t - 1e-9);
        if i >= amp.t.len() || (amp.t[i] - t).abs() > 1e-9 {
            return Err(Error::GridMismatch);
        }
        let c = &amp.c[i];
        let spec = solve_levels(amp.phi_r[i], dp, &GridSpec::fixed(points), c.len())?;
        let rebuilt = reconstruct_state(c, &amp.phase_integrals[i], &spec, &run.grid);
        out.push(normalized_overlap(&rebuilt, psi));
    }
    Ok(out)
}

/// Overlap and norm histories of one oracle comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleCheck {
    pub n0: usize,
    pub t: Vec<f64>,
    pub overlap: Vec<f64>,
    /// Split-step norm at each snapshot.
    pub norm: Vec<f64>,
    pub min_overlap: f64,
}

/// Runs the moving-basis amplitudes and the split-step propagation side by
/// side over `[0, t_end]` and compares them at `snapshots` evenly spaced
/// times. The amplitude step is chosen so the snapshot times lie on its grid.
#[allow(clippy::too_many_arguments)]
pub fn oracle_check(
    n0: usize,
    dp: &DimensionlessParams,
    table: &SpectralTable,
    traj: &ResonatorTrajectory,
    t_end: f64,
    dt_amplitudes: f64,
    dt_oracle: f64,
    points: usize,
    snapshots: usize,
) -> Result<OracleCheck> {
    if snapshots == 0 {
        return Err(Error::InvalidArgument("no snapshots".into()));
    }
    let segment = t_end / snapshots as f64;
    let per_segment = (segment / step_bound(table, dt_amplitudes)).ceil();
    let amp = evolve_fixed(n0, dp, table, traj, t_end, segment / per_segment)?;
    let run = splitstep_oracle(n0, dp, traj, t_end, dt_oracle, points, snapshots)?;
    let overlap = compare_with_amplitudes(dp, &run, &amp, points)?;
    let min_overlap = overlap.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(OracleCheck {
        n0,
        t: run.t,
        overlap,
        norm: run.norm,
        min_overlap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{to_dimensionless, PhysicalParams};
    use crate::spectrum::solve_potential;

    #[test]
    fn eigenstate_is_stationary_under_static_potential() {
        let dp = to_dimensionless(&PhysicalParams::working()).unwrap();
        let g = well_geometry(0.0, &dp).unwrap();
        let (a, b) = left_well_domain(0.0, &dp, &g);
        let grid = Grid::interior(a, b, 1024);
        let (_, psi) = solve_potential(|x| potential(x, 0.0, &dp), dp.kinetic, grid, 2);
        let start: Vec<Complex64> = psi[1].iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let mut prop = SplitStep::new(&dp, grid, start.clone());
        let n0 = prop.norm();
        for i in 0..2000 {
            prop.step(&|_| 0.0, i as f64 * 5e-4, 5e-4);
        }
        assert!((prop.norm() - n0).abs() < 1e-10);
        assert!((normalized_overlap(&start, prop.state()) - 1.0).abs() < 1e-8);
    }
}
