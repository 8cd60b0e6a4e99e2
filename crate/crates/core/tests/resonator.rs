// Copyright 2026 The qnd Authors
// SPDX-License-Identifier: Apache-2.0

//! Resonator dynamics against closed-form small-oscillation results and
//! direct spectrum solves.

use qnd_core::circuit::{mr_initial_state, to_dimensionless};
use qnd_core::resonator::{
    build_response_curve, classical_hamiltonian, dressed_frequency, integrate_full_classical,
    integrate_resonator, Drive,
};
use qnd_core::roots::bisect;
use qnd_core::spectrum::{expected_delta, solve_spectrum, well_geometry, GridSpec};
use qnd_core::{CanonicalState, PhysicalParams, ResonatorState};

#[test]
fn response_curve_matches_direct_solves_between_knots() {
    let dp = to_dimensionless(&PhysicalParams::working()).unwrap();
    let spec = GridSpec::fixed(2048);
    for n in 0..2 {
        let curve = build_response_curve(n, &dp, -10.5, 0.5, 0.05, &spec).unwrap();
        let x = &curve.phi_r_samples;
        for i in (0..x.len() - 1).step_by(7) {
            let mid = 0.5 * (x[i] + x[i + 1]);
            let direct = expected_delta(&solve_spectrum(mid, &dp, &spec).unwrap(), n).unwrap();
            let err = (curve.eval(mid) - direct).abs();
            assert!(err <= 1e-6, "level {n} at {mid}: {err:e}");
        }
    }
}

/// Small oscillations about the equilibrium of the level-0 drive: the
/// frequency follows from the stiffness λ − μ·d⟨δ⟩/dφ_r.
#[test]
fn dressed_frequency_follows_response_slope() {
    let dp = to_dimensionless(&PhysicalParams::working()).unwrap();
    let spec = GridSpec::fixed(2048);
    let curve = build_response_curve(0, &dp, -7.0, -3.0, 0.05, &spec).unwrap();
    let force = |x: f64| dp.lambda * x - dp.mu * (curve.eval(x) - dp.phi_p);
    let eq = bisect(force, -7.0 + 0.1, -3.0 - 0.1).expect("equilibrium inside the curve");
    let h = 1e-3;
    let slope = (curve.eval(eq + h) - curve.eval(eq - h)) / (2.0 * h);
    let stiffness = dp.e_j_joules() / dp.delta_cap * (dp.lambda - dp.mu * slope);
    let expected = (stiffness / dp.m_r).sqrt() / (2.0 * std::f64::consts::PI) / 1e9;

    let kick = mr_initial_state(&dp, 1e-4).unwrap().p_r;
    let start = ResonatorState { phi_r: eq, p_r: kick };
    let traj = integrate_resonator(Some(0), &dp, Drive::Level(&curve), start, 40.0, 1e-3).unwrap();
    let measured = dressed_frequency(&traj).unwrap();
    assert!(
        (measured / expected - 1.0).abs() <= 1e-4,
        "measured {measured} GHz, expected {expected} GHz"
    );
    assert!(measured > dp.f_r, "the qubit stiffens the resonator here");
}

#[test]
fn full_classical_energy_drift_over_10ns() {
    let dp = to_dimensionless(&PhysicalParams::working()).unwrap();
    let g = well_geometry(0.0, &dp).unwrap();
    let start = CanonicalState::from_resonator(mr_initial_state(&dp, 10.0).unwrap(), g.delta_left_min, 0.0);
    let series = integrate_full_classical(&dp, start, 10.0, 2e-5, 1000).unwrap();
    let e0 = classical_hamiltonian(&dp, &start);
    let worst = series
        .states
        .iter()
        .map(|s| (classical_hamiltonian(&dp, s) / e0 - 1.0).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-8, "relative drift {worst:e}");
}
