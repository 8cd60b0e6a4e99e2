// Copyright 2026 The qnd Authors
// SPDX-License-Identifier: Apache-2.0

//! Tridiagonal linear algebra: a symmetric eigensolver (Sturm bisection plus
//! inverse iteration) and Thomas solves for real and complex systems.

use num_complex::Complex64;

/// Real symmetric tridiagonal matrix.
#[derive(Debug, Clone)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    /// Sub/super-diagonal, length `n - 1`.
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert!(!diag.is_empty());
        assert_eq!(off.len() + 1, diag.len());
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    fn norm_bound(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence / LDLᵀ inertia).
    pub fn count_below(&self, x: f64) -> usize {
        let pivmin = f64::MIN_POSITIVE.max(f64::EPSILON * f64::EPSILON * self.norm_bound());
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.len() {
            let e = self.off[i - 1];
            q = (self.diag[i] - x) - e * e / q;
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection on the Sturm count.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (lo, hi) = self.gershgorin();
        self.eigenvalue_in(k, lo, hi)
    }

    fn eigenvalue_in(&self, k: usize, mut lo: f64, mut hi: f64) -> f64 {
        assert!(k < self.len());
        let floor = self.tolerance_floor();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if converged(lo, hi, floor, 2.0 * f64::EPSILON) || mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn tolerance_floor(&self) -> f64 {
        1e-15 * self.norm_bound()
    }

    /// Sturm counts at four shifts in one sweep; the four recurrences are
    /// independent, which hides the division latency.
    fn count_below4(&self, x: [f64; 4]) -> [usize; 4] {
        let pivmin = f64::MIN_POSITIVE.max(f64::EPSILON * f64::EPSILON * self.norm_bound());
        let mut count = [0usize; 4];
        let mut q = [0.0; 4];
        for j in 0..4 {
            q[j] = self.diag[0] - x[j];
            if q[j].abs() < pivmin {
                q[j] = -pivmin;
            }
            count[j] += usize::from(q[j] < 0.0);
        }
        for i in 1..self.len() {
            let e2 = self.off[i - 1] * self.off[i - 1];
            let d = self.diag[i];
            for j in 0..4 {
                let mut v = (d - x[j]) - e2 / q[j];
                if v.abs() < pivmin {
                    v = -pivmin;
                }
                count[j] += usize::from(v < 0.0);
                q[j] = v;
            }
        }
        count
    }

    /// The `count` smallest eigenvalues in ascending order, by simultaneous
    /// bisection: every Sturm count narrows the brackets of all levels.
    pub fn lowest_eigenvalues(&self, count: usize) -> Vec<f64> {
        self.bisect_lowest(count, 2.0 * f64::EPSILON)
    }

    /// Simultaneous bisection down to brackets of relative width `rel`.
    fn bisect_lowest(&self, count: usize, rel: f64) -> Vec<f64> {
        let count = count.min(self.len());
        let (g_lo, g_hi) = self.gershgorin();
        let floor = self.tolerance_floor();
        let mut lo = vec![g_lo; count];
        let mut hi = vec![g_hi; count];
        for _ in 0..200 {
            let mut mids: Vec<f64> = Vec::with_capacity(count);
            for k in 0..count {
                let (a, b) = (lo[k], hi[k]);
                let mid = 0.5 * (a + b);
                if converged(a, b, floor, rel) || mid <= a || mid >= b {
                    continue;
                }
                if mids.last() != Some(&mid) {
                    mids.push(mid);
                }
            }
            if mids.is_empty() {
                break;
            }
            for chunk in mids.chunks(4) {
                let mut x = [chunk[0]; 4];
                x[..chunk.len()].copy_from_slice(chunk);
                let c = self.count_below4(x);
                for (&mid, &c) in x.iter().zip(&c).take(chunk.len()) {
                    for j in 0..count {
                        if j < c {
                            hi[j] = hi[j].min(mid);
                        } else {
                            lo[j] = lo[j].max(mid);
                        }
                    }
                }
            }
        }
        lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    /// Eigenvector for a converged eigenvalue by inverse iteration, kept
    /// orthogonal to `previous` (modified Gram-Schmidt). Unit Euclidean norm.
    pub fn eigenvector(&self, lambda: f64, previous: &[Vec<f64>]) -> Vec<f64> {
        let n = self.len();
        let lu = TridiagLu::factor(&self.off, &self.diag, &self.off, lambda, self.norm_bound());
        // Deterministic, non-degenerate start vector.
        let mut v: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i as f64) * 0.618_033_988_7).fract())
            .collect();
        orthonormalize(&mut v, previous);
        for _ in 0..3 {
            lu.solve(&mut v);
            orthonormalize(&mut v, previous);
        }
        v
    }

    /// The `count` lowest eigenpairs. Vectors have unit Euclidean norm.
    ///
    /// Eigenvalues are bisected only to a relative width of 1e-7, which is
    /// enough for inverse iteration, and then replaced by Rayleigh quotients.
    pub fn lowest_eigenpairs(&self, count: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
        let mut values = self.bisect_lowest(count, 1e-7);
        let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(values.len());
        for ev in values.iter_mut() {
            let v = self.eigenvector(*ev, &vectors);
            *ev = self.rayleigh_quotient(&v);
            vectors.push(v);
        }
        (values, vectors)
    }

    /// `vᵀTv` for a unit vector `v`.
    fn rayleigh_quotient(&self, v: &[f64]) -> f64 {
        let n = self.len();
        let mut acc = 0.0;
        for i in 0..n {
            let mut tv = self.diag[i] * v[i];
            if i > 0 {
                tv += self.off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                tv += self.off[i] * v[i + 1];
            }
            acc += v[i] * tv;
        }
        acc
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off[i] * x[i + 1];
                }
                y
            })
            .collect()
    }
}

fn converged(lo: f64, hi: f64, floor: f64, rel: f64) -> bool {
    hi - lo <= rel * lo.abs().max(hi.abs()) + floor
}

fn orthonormalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let proj: f64 = v.iter().zip(b).map(|(a, b)| a * b).sum();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= proj * bi;
            }
        }
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

/// LU factorisation with partial pivoting of a general tridiagonal matrix
/// shifted by `-shift` on the diagonal.
struct TridiagLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    fn factor(sub: &[f64], diag: &[f64], sup: &[f64], shift: f64, scale: f64) -> Self {
        let n = diag.len();
        let mut dl = sub.to_vec();
        let mut d: Vec<f64> = diag.iter().map(|x| x - shift).collect();
        let mut du = sup.to_vec();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        let tiny = f64::EPSILON * scale.max(f64::MIN_POSITIVE);
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        for x in d.iter_mut() {
            if *x == 0.0 {
                *x = tiny;
            }
        }
        Self {
            dl,
            d,
            du,
            du2,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

/// Solves a tridiagonal system in place by the Thomas algorithm. Requires a
/// diagonally dominant (or otherwise pivot-safe) matrix.
pub fn thomas_solve(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut beta = diag[0];
    if n > 1 {
        c[0] = sup[0] / beta;
    }
    rhs[0] /= beta;
    for i in 1..n {
        beta = diag[i] - sub[i - 1] * c[i - 1];
        if i + 1 < n {
            c[i] = sup[i] / beta;
        }
        rhs[i] = (rhs[i] - sub[i - 1] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}

/// Thomas solve for a complex tridiagonal system with constant off-diagonals.
/// `scratch` must have the same length as `rhs`.
pub fn thomas_solve_complex(
    off: Complex64,
    diag: &[Complex64],
    rhs: &mut [Complex64],
    scratch: &mut [Complex64],
) {
    let n = diag.len();
    let mut beta = diag[0];
    if n > 1 {
        scratch[0] = off / beta;
    }
    rhs[0] /= beta;
    for i in 1..n {
        beta = diag[i] - off * scratch[i - 1];
        if i + 1 < n {
            scratch[i] = off / beta;
        }
        rhs[i] = (rhs[i] - off * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= scratch[i] * rhs[i + 1];
    }
}
