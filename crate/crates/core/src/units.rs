// Copyright 2026 The qnd Authors
// SPDX-License-Identifier: Apache-2.0

//! Physical constants (CODATA 2018, exact SI definitions where applicable)
//! and conversions into the internal GHz / ns unit system.

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Planck constant, J·s (exact).
pub const PLANCK: f64 = 6.626_070_15e-34;

/// Elementary charge, C (exact).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// Reduced flux quantum ħ/2e, Wb.
pub const PHI0: f64 = HBAR / (2.0 * ELEMENTARY_CHARGE);

/// Seconds per nanosecond.
pub const NS: f64 = 1e-9;

/// Hz per GHz.
pub const GHZ: f64 = 1e9;

/// Energy in joules to frequency `E/h` in GHz.
#[inline]
pub fn joules_to_ghz(energy: f64) -> f64 {
    energy / PLANCK / GHZ
}

/// Frequency `E/h` in GHz to energy in joules.
#[inline]
pub fn ghz_to_joules(freq: f64) -> f64 {
    freq * GHZ * PLANCK
}
