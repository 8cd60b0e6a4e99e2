// Copyright 2026 The qnd Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("circuit element {name} must be strictly positive, got {value:e}")]
    NonPositiveElement { name: &'static str, value: f64 },

    #[error("degenerate coupling: M² = {m_squared:e} H² is not below L·Lr = {l_lr:e} H²")]
    DegenerateCoupling { m_squared: f64, l_lr: f64 },

    #[error("mean resonator quanta must be non-negative, got {0}")]
    NegativeQuanta(f64),

    #[error("no left well exists at phi_r = {phi_r}")]
    WellVanished { phi_r: f64 },

    #[error("grid of {points} points not converged: level shift {shift:e} GHz exceeds {tolerance:e} GHz")]
    GridTooCoarse {
        points: usize,
        shift: f64,
        tolerance: f64,
    },

    #[error("left well holds {n_left} level(s); a qubit needs at least two")]
    NotAQubit { n_left: usize },

    #[error("level index {index} out of range (left well holds {n_left})")]
    LevelIndex { index: usize, n_left: usize },

    #[error("level {level} leaves the left well at phi_r = {phi_r}")]
    LevelLost { level: usize, phi_r: f64 },

    #[error("n_left jumps from {from} to {to} between phi_r = {phi_a} and {phi_b}")]
    LevelCountJump {
        from: usize,
        to: usize,
        phi_a: f64,
        phi_b: f64,
    },

    #[error("resonator flux {phi_r} left the tabulated range [{lo}, {hi}]")]
    CurveRangeExceeded { phi_r: f64, lo: f64, hi: f64 },

    #[error("degenerate trajectory: no oscillation to extract a phase from")]
    DegenerateTrajectory,

    #[error("time grids do not match")]
    GridMismatch,

    #[error("levels {k} and {m} are nearly degenerate: gap {gap:e} GHz below guard {guard:e} GHz")]
    NearDegeneracy {
        k: usize,
        m: usize,
        gap: f64,
        guard: f64,
    },

    #[error("step-halving changed the final amplitudes by {deviation:e} (limit {limit:e})")]
    StepTooCoarse { deviation: f64, limit: f64 },

    #[error("averaging window {t_a} ns exceeds the series length {t_end} ns")]
    WindowExceedsSeries { t_a: f64, t_end: f64 },

    #[error("required fidelity must lie in (0, 1), got {0}")]
    FidelityOutOfRange(f64),

    #[error("F1 never drops below {threshold} for {param} within ±50%")]
    NoCrossing { param: String, threshold: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
