// Copyright 2026 The qnd Authors
// SPDX-License-Identifier: Apache-2.0

//! Instantaneous eigenproblem of the qubit at fixed resonator flux.
//!
//! The Hamiltonian `−(ħ²/2m)∂²_δ + U(δ; φ_r)` is discretised by central
//! differences on the left shallow well only: from the point left of the well
//! where `U` reaches `U_barrier + 10·barrier_height` up to the barrier top,
//! with zero boundary values. Levels below the barrier are the left-well
//! ladder.

use serde::{Deserialize, Serialize};

use crate::circuit::DimensionlessParams;
use crate::linalg::SymTridiagonal;
use crate::roots::{bisect, scan_roots};
use crate::units::{GHZ, PLANCK};
use crate::{Error, Result};

/// Height above the barrier, in barrier heights, where the left domain edge sits.
pub const LEFT_EDGE_BARRIERS: f64 = 10.0;

/// Discretisation controls for [`solve_spectrum`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Interior grid points.
    pub points: usize,
    /// Refine `points → 2·points + 1` until the retained levels move by less
    /// than both `tolerance·(E₁ − E₀)` and `abs_tolerance`.
    pub refine: bool,
    pub tolerance: f64,
    /// GHz
    pub abs_tolerance: f64,
    pub max_points: usize,
    /// Fixed `[δ_a, δ_b]` instead of the well-adapted domain.
    pub domain: Option<(f64, f64)>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            points: 2048,
            refine: true,
            tolerance: 1e-4,
            abs_tolerance: 1e-4,
            max_points: 1 << 17,
            domain: None,
        }
    }
}

impl GridSpec {
    pub fn fixed(points: usize) -> Self {
        Self {
            points,
            refine: false,
            ..Self::default()
        }
    }

    pub fn with_domain(mut self, a: f64, b: f64) -> Self {
        self.domain = Some((a, b));
        self
    }
}

/// Stationary points of the qubit potential around the left shallow well.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WellGeometry {
    pub delta_left_min: f64,
    pub delta_barrier: f64,
    pub delta_right_min: f64,
    pub u_left_min: f64,
    pub u_barrier: f64,
    pub u_right_min: f64,
    pub barrier_height: f64,
}

/// Uniform δ-grid of interior points `start + i·step`, `i < count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

impl Grid {
    /// Interior points of `[a, b]` with `points` unknowns.
    pub fn interior(a: f64, b: f64, points: usize) -> Self {
        let step = (b - a) / (points + 1) as f64;
        Self {
            start: a + step,
            step,
            count: points,
        }
    }

    pub fn x(&self, i: usize) -> f64 {
        self.start + self.step * i as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.x(i)).collect()
    }

    /// Left and right Dirichlet edges.
    pub fn edges(&self) -> (f64, f64) {
        (self.start - self.step, self.x(self.count))
    }

    /// Linear interpolation of grid samples `f` at `x`, zero outside.
    pub fn interpolate(&self, f: &[f64], x: f64) -> f64 {
        let pos = (x - self.start) / self.step;
        if pos < -1.0 || pos > self.count as f64 {
            return 0.0;
        }
        let i = pos.floor();
        let w = pos - i;
        let at = |j: f64| {
            if j < 0.0 || j >= self.count as f64 {
                0.0
            } else {
                f[j as usize]
            }
        };
        (1.0 - w) * at(i) + w * at(i + 1.0)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstantSpectrum {
    pub phi_r: f64,
    pub grid: Grid,
    /// Ascending `E_m/h`, GHz.
    pub energies: Vec<f64>,
    /// Grid samples of ψ_m normalised so that `Σψ²·step = 1`.
    pub wavefunctions: Vec<Vec<f64>>,
    /// Levels with `E < U_barrier`.
    pub n_left: usize,
    pub geometry: WellGeometry,
}

/// `U(δ; φ_r)/h` in GHz.
pub fn potential(delta: f64, phi_r: f64, dp: &DimensionlessParams) -> f64 {
    let d = dp.delta_cap;
    dp.e_j
        * ((dp.lambda_r / (2.0 * d)) * (delta - dp.phi_p).powi(2) - delta.cos() - (dp.mu / d) * phi_r * delta)
}

/// `∂U/∂δ` in GHz.
pub fn potential_derivative(delta: f64, phi_r: f64, dp: &DimensionlessParams) -> f64 {
    let d = dp.delta_cap;
    dp.e_j * (delta.sin() + (dp.lambda_r / d) * (delta - dp.phi_p) - (dp.mu / d) * phi_r)
}

/// `∂²U/∂δ²` in GHz.
pub fn potential_curvature(delta: f64, dp: &DimensionlessParams) -> f64 {
    dp.e_j * (delta.cos() + dp.lambda_r / dp.delta_cap)
}

/// Small-oscillation frequency `(1/2π)√(U″/m)` at `delta`, GHz.
pub fn plasma_frequency(delta: f64, dp: &DimensionlessParams) -> f64 {
    let curvature_joules = potential_curvature(delta, dp) * GHZ * PLANCK;
    (curvature_joules / dp.m).sqrt() / (2.0 * std::f64::consts::PI) / GHZ
}

/// Locates the left shallow well: the local minimum immediately left of the
/// global minimum, and the barrier between them.
pub fn well_geometry(phi_r: f64, dp: &DimensionlessParams) -> Result<WellGeometry> {
    // Stationary points need |sin δ| = (λ_r/Δ)|δ − centre| ≤ 1.
    let centre = dp.phi_p + dp.mu / dp.lambda_r * phi_r;
    let half = dp.delta_cap / dp.lambda_r + 0.1;
    let samples = ((2.0 * half / 1e-3).ceil() as usize).max(64);
    let du = |x: f64| potential_derivative(x, phi_r, dp);
    let roots = scan_roots(du, centre - half, centre + half, samples);
    let vanished = Error::WellVanished { phi_r };
    let values: Vec<f64> = roots.iter().map(|&x| potential(x, phi_r, dp)).collect();
    let deep = (0..roots.len())
        .filter(|&i| potential_curvature(roots[i], dp) > 0.0)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .ok_or(vanished)?;
    if deep < 2 {
        return Err(Error::WellVanished { phi_r });
    }
    let (l, b) = (deep - 2, deep - 1);
    if potential_curvature(roots[l], dp) <= 0.0 || potential_curvature(roots[b], dp) >= 0.0 {
        return Err(Error::WellVanished { phi_r });
    }
    let barrier_height = values[b] - values[l];
    if barrier_height <= 0.0 {
        return Err(Error::WellVanished { phi_r });
    }
    Ok(WellGeometry {
        delta_left_min: roots[l],
        delta_barrier: roots[b],
        delta_right_min: roots[deep],
        u_left_min: values[l],
        u_barrier: values[b],
        u_right_min: values[deep],
        barrier_height,
    })
}

/// Decay lengths kept beyond the outer classical turning point at the barrier
/// energy.
pub const TURNING_POINT_PAD: f64 = 4.0;

/// Restricted domain `[δ_a, δ_b]` of the left well. The left edge is the
/// tighter of the point where `U` reaches `U_b + 10·barrier_height` and the
/// outer turning point at `U_b` padded by four decay lengths
/// `sqrt(ħ²/2m / barrier_height)`.
pub fn left_well_domain(phi_r: f64, dp: &DimensionlessParams, g: &WellGeometry) -> (f64, f64) {
    let below = |level: f64| {
        let excess = |x: f64| potential(x, phi_r, dp) - level;
        let mut step = 0.1;
        let mut lo = g.delta_left_min - step;
        while excess(lo) < 0.0 {
            step *= 1.5;
            lo = g.delta_left_min - step;
        }
        bisect(excess, lo, g.delta_left_min).unwrap_or(lo)
    };
    let high_wall = below(g.u_barrier + LEFT_EDGE_BARRIERS * g.barrier_height);
    let decay = (dp.kinetic / g.barrier_height).sqrt();
    let padded_turn = below(g.u_barrier) - TURNING_POINT_PAD * decay;
    (high_wall.max(padded_turn), g.delta_barrier)
}

/// Lowest `count` eigenpairs of `−kinetic·∂² + u` on the interior grid of
/// `[a, b]` with zero boundary values. Wavefunctions are normalised on the
/// grid quadrature and carry the standalone gauge.
pub fn solve_potential<F: Fn(f64) -> f64>(
    u: F,
    kinetic: f64,
    grid: Grid,
    count: usize,
) -> (Vec<f64>, Vec<Vec<f64>>) {
    let h = hamiltonian(&u, kinetic, grid);
    let (energies, mut vectors) = h.lowest_eigenpairs(count);
    let scale = 1.0 / grid.step.sqrt();
    for v in &mut vectors {
        v.iter_mut().for_each(|x| *x *= scale);
        fix_gauge(v);
    }
    (energies, vectors)
}

fn hamiltonian<F: Fn(f64) -> f64>(u: &F, kinetic: f64, grid: Grid) -> SymTridiagonal {
    let k = kinetic / (grid.step * grid.step);
    let diag = (0..grid.count).map(|i| 2.0 * k + u(grid.x(i))).collect();
    SymTridiagonal::new(diag, vec![-k; grid.count.saturating_sub(1)])
}

/// Makes the first sample above 1e-3 of the peak positive.
pub fn fix_gauge(v: &mut [f64]) {
    let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-3 * peak) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

struct Problem {
    geometry: WellGeometry,
    domain: (f64, f64),
}

fn setup(phi_r: f64, dp: &DimensionlessParams, spec: &GridSpec) -> Result<Problem> {
    let geometry = well_geometry(phi_r, dp)?;
    let domain = spec
        .domain
        .unwrap_or_else(|| left_well_domain(phi_r, dp, &geometry));
    Ok(Problem { geometry, domain })
}

fn solve_on(
    phi_r: f64,
    dp: &DimensionlessParams,
    prob: &Problem,
    points: usize,
    count: Option<usize>,
) -> InstantSpectrum {
    let grid = Grid::interior(prob.domain.0, prob.domain.1, points);
    let u = |x: f64| potential(x, phi_r, dp);
    let h = hamiltonian(&u, dp.kinetic, grid);
    let n_left = h.count_below(prob.geometry.u_barrier);
    let (energies, wavefunctions) = solve_potential(u, dp.kinetic, grid, count.unwrap_or(n_left));
    InstantSpectrum {
        phi_r,
        grid,
        energies,
        wavefunctions,
        n_left,
        geometry: prob.geometry,
    }
}

/// Number of left-well levels at `phi_r` on a grid of `points` unknowns,
/// from a single Sturm count.
pub fn count_left_levels(phi_r: f64, dp: &DimensionlessParams, spec: &GridSpec) -> Result<usize> {
    let prob = setup(phi_r, dp, spec)?;
    let grid = Grid::interior(prob.domain.0, prob.domain.1, spec.points);
    let u = |x: f64| potential(x, phi_r, dp);
    Ok(hamiltonian(&u, dp.kinetic, grid).count_below(prob.geometry.u_barrier))
}

/// All left-well levels at `phi_r`.
pub fn solve_spectrum(phi_r: f64, dp: &DimensionlessParams, spec: &GridSpec) -> Result<InstantSpectrum> {
    solve_inner(phi_r, dp, spec, None)
}

/// The lowest `count` levels at `phi_r`, whether or not they lie below the
/// barrier. `n_left` still counts the left-well levels.
pub fn solve_levels(
    phi_r: f64,
    dp: &DimensionlessParams,
    spec: &GridSpec,
    count: usize,
) -> Result<InstantSpectrum> {
    solve_inner(phi_r, dp, spec, Some(count))
}

fn solve_inner(
    phi_r: f64,
    dp: &DimensionlessParams,
    spec: &GridSpec,
    count: Option<usize>,
) -> Result<InstantSpectrum> {
    let prob = setup(phi_r, dp, spec)?;
    let mut points = spec.points;
    let mut coarse = solve_on(phi_r, dp, &prob, points, count);
    if !spec.refine {
        return Ok(coarse);
    }
    // Shift seen at the last refinement; NaN until one has been made.
    let mut last = (f64::NAN, f64::NAN);
    loop {
        let next = 2 * points + 1;
        if next > spec.max_points {
            return Err(Error::GridTooCoarse {
                points,
                shift: last.0,
                tolerance: last.1,
            });
        }
        let fine = solve_on(phi_r, dp, &prob, next, count);
        last = level_shift(&coarse, &fine, spec);
        if last.0 <= last.1 {
            return Ok(coarse);
        }
        points = next;
        coarse = fine;
    }
}

/// Largest shift among the levels retained by both solves, against the
/// tighter of the absolute tolerance and the one scaled by the level spacing.
fn level_shift(a: &InstantSpectrum, b: &InstantSpectrum, spec: &GridSpec) -> (f64, f64) {
    let shared = a.energies.len().min(b.energies.len());
    let shift = (0..shared)
        .map(|k| (a.energies[k] - b.energies[k]).abs())
        .fold(0.0, f64::max);
    let spacing = if b.energies.len() >= 2 {
        b.energies[1] - b.energies[0]
    } else {
        1.0
    };
    (shift, (spec.tolerance * spacing).min(spec.abs_tolerance))
}

/// Qubit frequency `(E₁ − E₀)/h`, GHz.
pub fn qubit_frequency(spec: &InstantSpectrum) -> Result<f64> {
    if spec.n_left < 2 {
        return Err(Error::NotAQubit { n_left: spec.n_left });
    }
    Ok(spec.energies[1] - spec.energies[0])
}

/// `⟨ψ_n|δ|ψ_n⟩` for a left-well level.
pub fn expected_delta(spec: &InstantSpectrum, n: usize) -> Result<f64> {
    dipole_matrix(spec, n, n)
}

/// `⟨ψ_k|δ|ψ_m⟩` for left-well levels.
pub fn dipole_matrix(spec: &InstantSpectrum, k: usize, m: usize) -> Result<f64> {
    for index in [k, m] {
        if index >= spec.n_left || index >= spec.energies.len() {
            return Err(Error::LevelIndex {
                index,
                n_left: spec.n_left,
            });
        }
    }
    Ok(spec.dipole(k, m))
}

impl InstantSpectrum {
    /// `⟨ψ_k|δ|ψ_m⟩` for any retained level, unchecked against `n_left`.
    pub fn dipole(&self, k: usize, m: usize) -> f64 {
        let (a, b) = (&self.wavefunctions[k], &self.wavefunctions[m]);
        let g = &self.grid;
        (0..g.count).map(|i| a[i] * b[i] * g.x(i)).sum::<f64>() * g.step
    }

    pub fn overlap(&self, k: usize, m: usize) -> f64 {
        let (a, b) = (&self.wavefunctions[k], &self.wavefunctions[m]);
        a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * self.grid.step
    }

    /// Overlap of level `k` with a wavefunction sampled on another grid,
    /// interpolated linearly onto this one.
    pub fn overlap_with(&self, k: usize, other_grid: &Grid, other: &[f64]) -> f64 {
        let g = &self.grid;
        (0..g.count)
            .map(|i| self.wavefunctions[k][i] * other_grid.interpolate(other, g.x(i)))
            .sum::<f64>()
            * g.step
    }

    /// Flips signs so each level overlaps positively with the same level of
    /// `previous`.
    pub fn align_gauge(&mut self, previous: &InstantSpectrum) {
        let shared = self.energies.len().min(previous.energies.len());
        for k in 0..shared {
            if self.overlap_with(k, &previous.grid, &previous.wavefunctions[k]) < 0.0 {
                self.wavefunctions[k].iter_mut().for_each(|x| *x = -*x);
            }
        }
    }

    /// Level gaps `E_{k+1} − E_k` among the first `count` levels.
    pub fn min_gap(&self, count: usize) -> Option<(usize, f64)> {
        (1..count.min(self.energies.len()))
            .map(|k| (k - 1, self.energies[k] - self.energies[k - 1]))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }
}
