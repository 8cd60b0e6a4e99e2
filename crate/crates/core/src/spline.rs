// Copyright 2026 The qnd Authors
// SPDX-License-Identifier: Apache-2.0

//! Not-a-knot cubic splines on a uniform grid, several series sharing the
//! same knots.

use crate::linalg::thomas_solve;

#[derive(Debug, Clone)]
pub struct UniformSpline {
    x0: f64,
    step: f64,
    n: usize,
    /// Knot values, one vector per series.
    values: Vec<Vec<f64>>,
    /// Second derivatives at the knots, one vector per series.
    curvature: Vec<Vec<f64>>,
    /// ∫ from x0 to each knot, one vector per series.
    cumulative: Vec<Vec<f64>>,
}

impl UniformSpline {
    /// Builds splines through `series[s][i]` at `x0 + i·step`. Needs at least
    /// four knots.
    pub fn new(x0: f64, step: f64, series: Vec<Vec<f64>>) -> Self {
        assert!(step > 0.0);
        let n = series.first().map_or(0, Vec::len);
        assert!(n >= 4, "not-a-knot spline needs at least four knots");
        assert!(series.iter().all(|s| s.len() == n));
        let curvature: Vec<Vec<f64>> = series.iter().map(|y| second_derivatives(y, step)).collect();
        let cumulative = series
            .iter()
            .zip(&curvature)
            .map(|(y, m)| {
                let mut acc = Vec::with_capacity(n);
                let mut total = 0.0;
                acc.push(0.0);
                for i in 0..n - 1 {
                    total += step * (y[i] + y[i + 1]) / 2.0 - step.powi(3) * (m[i] + m[i + 1]) / 24.0;
                    acc.push(total);
                }
                acc
            })
            .collect();
        Self {
            x0,
            step,
            n,
            values: series,
            curvature,
            cumulative,
        }
    }

    pub fn single(x0: f64, step: f64, y: Vec<f64>) -> Self {
        Self::new(x0, step, vec![y])
    }

    pub fn x_min(&self) -> f64 {
        self.x0
    }

    pub fn x_max(&self) -> f64 {
        self.x0 + self.step * (self.n - 1) as f64
    }

    pub fn knots(&self) -> usize {
        self.n
    }

    pub fn series_count(&self) -> usize {
        self.values.len()
    }

    pub fn knot_values(&self, series: usize) -> &[f64] {
        &self.values[series]
    }

    fn locate(&self, x: f64) -> (usize, f64) {
        let pos = (x - self.x0) / self.step;
        let i = (pos.floor().max(0.0) as usize).min(self.n - 2);
        (i, x - (self.x0 + self.step * i as f64))
    }

    pub fn eval(&self, series: usize, x: f64) -> f64 {
        let (i, t) = self.locate(x);
        self.eval_at(series, i, t)
    }

    fn eval_at(&self, s: usize, i: usize, t: f64) -> f64 {
        let y = &self.values[s];
        let m = &self.curvature[s];
        let h = self.step;
        let b = (y[i + 1] - y[i]) / h - h * (2.0 * m[i] + m[i + 1]) / 6.0;
        y[i] + t * (b + t * (m[i] / 2.0 + t * (m[i + 1] - m[i]) / (6.0 * h)))
    }

    /// Evaluates every series at `x` into `out`.
    pub fn eval_all(&self, x: f64, out: &mut [f64]) {
        let (i, t) = self.locate(x);
        for (s, o) in out.iter_mut().enumerate().take(self.values.len()) {
            *o = self.eval_at(s, i, t);
        }
    }

    pub fn derivative(&self, series: usize, x: f64) -> f64 {
        let (i, t) = self.locate(x);
        let y = &self.values[series];
        let m = &self.curvature[series];
        let h = self.step;
        let b = (y[i + 1] - y[i]) / h - h * (2.0 * m[i] + m[i + 1]) / 6.0;
        b + t * (m[i] + t * (m[i + 1] - m[i]) / (2.0 * h))
    }

    /// ∫ from `x_min` to `x` of the spline.
    pub fn integral(&self, series: usize, x: f64) -> f64 {
        let (i, t) = self.locate(x);
        let y = &self.values[series];
        let m = &self.curvature[series];
        let h = self.step;
        let b = (y[i + 1] - y[i]) / h - h * (2.0 * m[i] + m[i + 1]) / 6.0;
        self.cumulative[series][i]
            + t * (y[i] + t * (b / 2.0 + t * (m[i] / 6.0 + t * (m[i + 1] - m[i]) / (24.0 * h))))
    }
}

fn second_derivatives(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    let rhs_at = |i: usize| (y[i + 1] - 2.0 * y[i] + y[i - 1]) / h;
    // Unknowns M_1..M_{n-2}. Not-a-knot at x_1 and x_{n-2} turns the first and
    // last rows into h·M = r.
    let k = n - 2;
    let mut sub = vec![h / 6.0; k.saturating_sub(1)];
    let mut diag = vec![2.0 * h / 3.0; k];
    let mut sup = vec![h / 6.0; k.saturating_sub(1)];
    let mut rhs: Vec<f64> = (1..n - 1).map(rhs_at).collect();
    diag[0] = h;
    if k > 1 {
        sup[0] = 0.0;
        diag[k - 1] = h;
        sub[k - 2] = 0.0;
    }
    thomas_solve(&sub, &diag, &sup, &mut rhs);
    let mut m = Vec::with_capacity(n);
    m.push(2.0 * rhs[0] - rhs.get(1).copied().unwrap_or(rhs[0]));
    m.extend_from_slice(&rhs);
    let last = rhs[k - 1];
    let before = if k > 1 { rhs[k - 2] } else { last };
    m.push(2.0 * last - before);
    m
}
