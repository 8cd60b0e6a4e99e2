// Copyright 2026 The qnd Authors
// SPDX-License-Identifier: Apache-2.0

//! Left-well spectra tabulated on a uniform resonator-flux grid and
//! interpolated by cubic splines: energies, the barrier top and the matrix
//! `⟨ψ_k|δ|ψ_m⟩`, all in a continuous eigenvector gauge.

use crate::circuit::DimensionlessParams;
use crate::spectrum::{count_left_levels, solve_levels, solve_spectrum, GridSpec, InstantSpectrum};
use crate::spline::UniformSpline;
use crate::{Error, Result};

/// Largest flux spacing between tabulated spectra.
pub const DEFAULT_FLUX_STEP: f64 = 0.05;

#[derive(Debug, Clone)]
pub struct SpectralTable {
    /// Levels stored at every sample, including those above the barrier at
    /// some fluxes.
    pub levels: usize,
    /// Grid points used for every sample.
    pub grid_points: usize,
    /// Flux samples.
    pub phi_r: Vec<f64>,
    /// Left-well level count at every sample.
    pub n_left: Vec<usize>,
    spline: UniformSpline,
}

/// Interpolated spectrum at one flux.
#[derive(Debug, Clone, PartialEq)]
pub struct TableSample {
    pub energies: Vec<f64>,
    /// Row-major `levels × levels` matrix `⟨ψ_k|δ|ψ_m⟩`.
    pub dipole: Vec<f64>,
    pub u_barrier: f64,
}

impl TableSample {
    pub fn dipole(&self, k: usize, m: usize) -> f64 {
        self.dipole[k * self.energies.len() + m]
    }

    pub fn n_left(&self) -> usize {
        self.energies.iter().filter(|&&e| e < self.u_barrier).count()
    }
}

fn pair_index(levels: usize, k: usize, m: usize) -> usize {
    let (k, m) = if k <= m { (k, m) } else { (m, k) };
    // Upper triangle, row by row.
    k * levels - k * (k + 1) / 2 + m
}

impl SpectralTable {
    /// Tabulates `[lo, hi]` with spacing at most `max_step`. With
    /// `levels = None` every level that is below the barrier somewhere in the
    /// range is stored. The grid size comes from the refinement of `spec` at
    /// the two range ends and is then held fixed.
    pub fn build(
        dp: &DimensionlessParams,
        lo: f64,
        hi: f64,
        max_step: f64,
        levels: Option<usize>,
        spec: &GridSpec,
    ) -> Result<Self> {
        if !(hi > lo) || !(max_step > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "table range [{lo}, {hi}] with step {max_step}"
            )));
        }
        let samples = (((hi - lo) / max_step).ceil() as usize + 1).max(4);
        let step = (hi - lo) / (samples - 1) as f64;
        let phi_r: Vec<f64> = (0..samples).map(|i| lo + step * i as f64).collect();

        let grid_points = if spec.refine {
            let a = solve_spectrum(lo, dp, spec)?;
            let b = solve_spectrum(hi, dp, spec)?;
            a.grid.count.max(b.grid.count)
        } else {
            spec.points
        };
        let fixed = GridSpec {
            points: grid_points,
            refine: false,
            ..*spec
        };

        let n_left = phi_r
            .iter()
            .map(|&x| count_left_levels(x, dp, &fixed))
            .collect::<Result<Vec<_>>>()?;
        for i in 1..samples {
            if n_left[i].abs_diff(n_left[i - 1]) > 1 {
                return Err(Error::LevelCountJump {
                    from: n_left[i - 1],
                    to: n_left[i],
                    phi_a: phi_r[i - 1],
                    phi_b: phi_r[i],
                });
            }
        }
        let levels = levels
            .unwrap_or_else(|| n_left.iter().copied().max().unwrap_or(0))
            .max(1);

        let pairs = levels * (levels + 1) / 2;
        let mut series = vec![Vec::with_capacity(samples); levels + 1 + pairs];
        let mut previous: Option<InstantSpectrum> = None;
        for &x in &phi_r {
            let mut s = solve_levels(x, dp, &fixed, levels)?;
            if let Some(prev) = &previous {
                s.align_gauge(prev);
            }
            for k in 0..levels {
                series[k].push(s.energies[k]);
            }
            series[levels].push(s.geometry.u_barrier);
            for k in 0..levels {
                for m in k..levels {
                    series[levels + 1 + pair_index(levels, k, m)].push(s.dipole(k, m));
                }
            }
            previous = Some(s);
        }
        Ok(Self {
            levels,
            grid_points,
            phi_r,
            n_left,
            spline: UniformSpline::new(lo, step, series),
        })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.spline.x_min(), self.spline.x_max())
    }

    pub fn contains(&self, phi_r: f64) -> bool {
        let (lo, hi) = self.range();
        phi_r >= lo && phi_r <= hi
    }

    /// Interpolated spectrum at `phi_r`.
    pub fn sample(&self, phi_r: f64) -> TableSample {
        let mut out = TableSample {
            energies: vec![0.0; self.levels],
            dipole: vec![0.0; self.levels * self.levels],
            u_barrier: 0.0,
        };
        self.sample_into(phi_r, &mut out, &mut vec![0.0; self.spline.series_count()]);
        out
    }

    /// Allocation-free variant of [`sample`](Self::sample); `scratch` must
    /// hold one value per spline series.
    pub fn sample_into(&self, phi_r: f64, out: &mut TableSample, scratch: &mut Vec<f64>) {
        let l = self.levels;
        scratch.resize(self.spline.series_count(), 0.0);
        self.spline.eval_all(phi_r, scratch);
        out.energies.copy_from_slice(&scratch[..l]);
        out.u_barrier = scratch[l];
        for k in 0..l {
            for m in k..l {
                let v = scratch[l + 1 + pair_index(l, k, m)];
                out.dipole[k * l + m] = v;
                out.dipole[m * l + k] = v;
            }
        }
    }

    pub fn energy(&self, k: usize, phi_r: f64) -> f64 {
        self.spline.eval(k, phi_r)
    }

    pub fn u_barrier(&self, phi_r: f64) -> f64 {
        self.spline.eval(self.levels, phi_r)
    }

    pub fn dipole(&self, k: usize, m: usize, phi_r: f64) -> f64 {
        self.spline
            .eval(self.levels + 1 + pair_index(self.levels, k, m), phi_r)
    }

    /// `⟨δ⟩_n(φ_r)`.
    pub fn expected_delta(&self, n: usize, phi_r: f64) -> f64 {
        self.dipole(n, n, phi_r)
    }

    /// `∫ ⟨δ⟩_n dφ_r` from the lower range end.
    pub fn expected_delta_integral(&self, n: usize, phi_r: f64) -> f64 {
        self.spline
            .integral(self.levels + 1 + pair_index(self.levels, n, n), phi_r)
    }

    /// Tabulated `⟨δ⟩_n` at the samples.
    pub fn expected_delta_samples(&self, n: usize) -> &[f64] {
        self.spline
            .knot_values(self.levels + 1 + pair_index(self.levels, n, n))
    }

    /// Left-well level count from the interpolated energies.
    pub fn n_left_at(&self, phi_r: f64) -> usize {
        let ub = self.u_barrier(phi_r);
        (0..self.levels)
            .take_while(|&k| self.energy(k, phi_r) < ub)
            .count()
    }

    pub fn flux_step(&self) -> f64 {
        self.phi_r[1] - self.phi_r[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{to_dimensionless, PhysicalParams};
    use crate::spectrum::{expected_delta, solve_spectrum};

    #[test]
    fn pair_index_is_dense() {
        let l = 5;
        let mut seen = vec![false; l * (l + 1) / 2];
        for k in 0..l {
            for m in k..l {
                let i = pair_index(l, k, m);
                assert!(!seen[i]);
                seen[i] = true;
                assert_eq!(i, pair_index(l, m, k));
            }
        }
        assert!(seen.into_iter().all(|x| x));
    }

    #[test]
    fn interpolates_direct_solves_at_midpoints() {
        let dp = to_dimensionless(&PhysicalParams::working()).unwrap();
        let spec = GridSpec::fixed(1024);
        let table = SpectralTable::build(&dp, -1.0, 0.5, DEFAULT_FLUX_STEP, Some(2), &spec).unwrap();
        for i in 0..table.phi_r.len() - 1 {
            let x = 0.5 * (table.phi_r[i] + table.phi_r[i + 1]);
            let direct = solve_spectrum(x, &dp, &spec).unwrap();
            for n in 0..2 {
                let want = expected_delta(&direct, n).unwrap();
                assert!((table.expected_delta(n, x) - want).abs() < 1e-6);
                assert!((table.energy(n, x) / direct.energies[n] - 1.0).abs() < 1e-6);
            }
            assert!((table.dipole(0, 1, x) / direct.dipole(0, 1) - 1.0).abs() < 1e-4);
            assert_eq!(table.n_left_at(x), direct.n_left.min(2));
        }
    }

    #[test]
    fn gauge_is_continuous() {
        let dp = to_dimensionless(&PhysicalParams::working()).unwrap();
        let table =
            SpectralTable::build(&dp, -2.0, 0.5, DEFAULT_FLUX_STEP, Some(3), &GridSpec::fixed(1024)).unwrap();
        let d01 = table.spline.knot_values(3 + 1 + pair_index(3, 0, 1));
        assert!(d01.iter().all(|x| x.signum() == d01[0].signum()));
    }
}
