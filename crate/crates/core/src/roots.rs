// Copyright 2026 The qnd Authors
// SPDX-License-Identifier: Apache-2.0

//! Bracketed scalar root finding.

/// Bisection on a sign-changing bracket `[a, b]`. Runs until the bracket
/// stops shrinking in floating point, so the result is as accurate as `f`
/// can resolve.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> Option<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a.min(b) || mid >= a.max(b) {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Some(0.5 * (a + b))
}

/// All sign changes of `f` on a uniform scan of `[lo, hi]` with `samples`
/// points, each refined by bisection. Roots are returned in ascending order.
pub fn scan_roots<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, samples: usize) -> Vec<f64> {
    assert!(samples >= 2 && hi > lo);
    let step = (hi - lo) / (samples - 1) as f64;
    let mut roots = Vec::new();
    let mut x_prev = lo;
    let mut f_prev = f(lo);
    for i in 1..samples {
        let x = lo + step * i as f64;
        let fx = f(x);
        if f_prev == 0.0 {
            roots.push(x_prev);
        } else if fx != 0.0 && fx.signum() != f_prev.signum() {
            if let Some(r) = bisect(&f, x_prev, x) {
                roots.push(r);
            }
        }
        x_prev = x;
        f_prev = fx;
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_bracket() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0).is_none());
    }

    #[test]
    fn scans_all_sine_roots() {
        let roots = scan_roots(f64::sin, 0.5, 10.0, 1000);
        assert_eq!(roots.len(), 3);
        for (k, r) in roots.iter().enumerate() {
            assert!((r - (k + 1) as f64 * std::f64::consts::PI).abs() < 1e-14);
        }
    }
}
