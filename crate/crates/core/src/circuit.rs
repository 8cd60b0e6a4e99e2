// Copyright 2026 The qnd Authors
// SPDX-License-Identifier: Apache-2.0

//! Circuit parameters of the qubit loop and the measurement resonator, their
//! reduced (dimensionless) forms, and the flux/current relations.

use serde::{Deserialize, Serialize};

use crate::units::{joules_to_ghz, GHZ, HBAR, NS, PHI0, PLANCK};
use crate::{Error, Result};

/// Element values of the coupled circuit in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Junction capacitance, F.
    pub c: f64,
    /// Qubit-loop inductance, H.
    pub l: f64,
    /// Junction critical current, A.
    pub i0: f64,
    /// Resonator capacitance, F.
    pub c_r: f64,
    /// Resonator inductance, H.
    pub l_r: f64,
    /// Mutual inductance, H.
    pub m: f64,
    /// Permanent flux bias of the qubit loop in units of φ₀ = ħ/2e.
    pub phi_p: f64,
    /// Mean number of quanta initially stored in the resonator.
    pub n_quanta: f64,
}

impl PhysicalParams {
    /// The working point: C = 700 fF, L = 720 pH, I₀ = 1.7 μA,
    /// C_r = 4.4 pF, L_r = 23 nH, M = 1 nH, φ_p = 4.992, ⟨N⟩ = 10.
    pub fn working() -> Self {
        Self {
            c: 700e-15,
            l: 720e-12,
            i0: 1.7e-6,
            c_r: 4.4e-12,
            l_r: 23e-9,
            m: 1e-9,
            phi_p: 4.992,
            n_quanta: 10.0,
        }
    }

    pub fn with_m(mut self, m: f64) -> Self {
        self.m = m;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let elements = [
            ("C", self.c),
            ("L", self.l),
            ("I0", self.i0),
            ("Cr", self.c_r),
            ("Lr", self.l_r),
        ];
        for (name, value) in elements {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::NonPositiveElement { name, value });
            }
        }
        // M = 0 is the decoupled reference and is allowed.
        if !(self.m >= 0.0) || !self.m.is_finite() {
            return Err(Error::NonPositiveElement {
                name: "M",
                value: self.m,
            });
        }
        if !self.phi_p.is_finite() {
            return Err(Error::InvalidArgument(format!("phi_p = {}", self.phi_p)));
        }
        if self.n_quanta < 0.0 || !self.n_quanta.is_finite() {
            return Err(Error::NegativeQuanta(self.n_quanta));
        }
        let m_squared = self.m * self.m;
        let l_lr = self.l * self.l_r;
        if m_squared >= l_lr {
            return Err(Error::DegenerateCoupling { m_squared, l_lr });
        }
        Ok(())
    }

    /// Named scalar access used by sweeps and the reproducibility search.
    pub fn get(&self, name: &str) -> Result<f64> {
        Ok(match name {
            "C" => self.c,
            "L" => self.l,
            "I0" => self.i0,
            "Cr" => self.c_r,
            "Lr" => self.l_r,
            "M" => self.m,
            "phi_p" => self.phi_p,
            "n_quanta" => self.n_quanta,
            other => return Err(Error::InvalidArgument(format!("unknown parameter {other}"))),
        })
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        match name {
            "C" => self.c = value,
            "L" => self.l = value,
            "I0" => self.i0 = value,
            "Cr" => self.c_r = value,
            "Lr" => self.l_r = value,
            "M" => self.m = value,
            "phi_p" => self.phi_p = value,
            "n_quanta" => self.n_quanta = value,
            other => return Err(Error::InvalidArgument(format!("unknown parameter {other}"))),
        }
        Ok(())
    }
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self::working()
    }
}

/// Reduced parameters. Energies are stored as `E/h` in GHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessParams {
    /// Qubit angular mass φ₀²C, J·s².
    pub m: f64,
    /// Resonator angular mass φ₀²C_r, J·s².
    pub m_r: f64,
    /// L / L₀.
    pub lambda: f64,
    /// L_r / L₀.
    pub lambda_r: f64,
    /// M / L₀.
    pub mu: f64,
    /// Δ = λλ_r − μ².
    pub delta_cap: f64,
    /// Josephson energy φ₀I₀ as E_J/h, GHz.
    pub e_j: f64,
    /// L₀ = φ₀/I₀, H.
    pub l0: f64,
    pub phi_p: f64,
    /// Bare resonator frequency (L_rC_r)^(-1/2)/2π, GHz.
    pub f_r: f64,
    /// Kinetic prefactor ħ²/2m of the qubit as a frequency, GHz.
    pub kinetic: f64,
}

/// Reduces element values. Rejects non-positive elements and M² ≥ L·L_r.
pub fn to_dimensionless(pp: &PhysicalParams) -> Result<DimensionlessParams> {
    pp.validate()?;
    let l0 = PHI0 / pp.i0;
    let lambda = pp.l / l0;
    let lambda_r = pp.l_r / l0;
    let mu = pp.m / l0;
    let delta_cap = lambda * lambda_r - mu * mu;
    if !(delta_cap > 0.0) {
        return Err(Error::DegenerateCoupling {
            m_squared: pp.m * pp.m,
            l_lr: pp.l * pp.l_r,
        });
    }
    let m = PHI0 * PHI0 * pp.c;
    let m_r = PHI0 * PHI0 * pp.c_r;
    Ok(DimensionlessParams {
        m,
        m_r,
        lambda,
        lambda_r,
        mu,
        delta_cap,
        e_j: joules_to_ghz(PHI0 * pp.i0),
        l0,
        phi_p: pp.phi_p,
        f_r: 1.0 / (pp.l_r * pp.c_r).sqrt() / (2.0 * std::f64::consts::PI) / GHZ,
        kinetic: joules_to_ghz(HBAR * HBAR / (2.0 * m)),
    })
}

impl DimensionlessParams {
    /// Josephson energy in joules.
    pub fn e_j_joules(&self) -> f64 {
        self.e_j * GHZ * PLANCK
    }

    /// Critical current recovered from L₀, A.
    pub fn i0(&self) -> f64 {
        PHI0 / self.l0
    }

    /// ∂H_q/∂φ_r divided by δ, GHz: the qubit feels −E_J(μ/Δ)φ_r·δ.
    pub fn coupling(&self) -> f64 {
        -self.e_j * self.mu / self.delta_cap
    }

    /// Curvature of the bare resonator potential, E_J·λ/Δ, in joules.
    pub fn resonator_stiffness(&self) -> f64 {
        self.e_j_joules() * self.lambda / self.delta_cap
    }

    /// Resonator force −∂H_r/∂φ_r for a given qubit response ⟨δ⟩, J.
    pub fn resonator_force(&self, phi_r: f64, delta_avg: f64) -> f64 {
        -self.e_j_joules() / self.delta_cap * (self.lambda * phi_r - self.mu * (delta_avg - self.phi_p))
    }

    /// Reference angular frequency 2πf_r, rad/ns.
    pub fn omega_ref(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.f_r
    }

    /// Converts a resonator momentum (J·s) into dφ_r/dt in 1/ns.
    pub fn phi_r_rate(&self, p_r: f64) -> f64 {
        p_r / self.m_r * NS
    }
}

/// Supercurrents (I, I_r) in amperes for reduced total fluxes (φ, φ_r).
pub fn currents_from_fluxes(phi: f64, phi_r: f64, dp: &DimensionlessParams) -> (f64, f64) {
    let i0 = dp.i0();
    let d = dp.delta_cap;
    let i = i0 * ((dp.lambda_r / d) * (phi - dp.phi_p) - (dp.mu / d) * phi_r);
    let i_r = i0 * ((dp.lambda / d) * phi_r - (dp.mu / d) * (phi - dp.phi_p));
    (i, i_r)
}

/// Inverse of [`currents_from_fluxes`]: reduced fluxes (φ, φ_r) carried by
/// supercurrents (I, I_r).
///
/// Uses φ − φ_p = (L·I + M·I_r)/φ₀ and φ_r = (M·I + L_r·I_r)/φ₀, the exact
/// inverse of the current relation.
pub fn fluxes_from_currents(i: f64, i_r: f64, dp: &DimensionlessParams) -> (f64, f64) {
    let i_norm = i / dp.i0();
    let i_r_norm = i_r / dp.i0();
    let phi = dp.phi_p + dp.lambda * i_norm + dp.mu * i_r_norm;
    let phi_r = dp.mu * i_norm + dp.lambda_r * i_r_norm;
    (phi, phi_r)
}

/// Resonator part of the canonical state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonatorState {
    pub phi_r: f64,
    /// J·s
    pub p_r: f64,
}

/// Full canonical state of the classical circuit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalState {
    pub phi_r: f64,
    /// J·s
    pub p_r: f64,
    pub delta: f64,
    /// J·s
    pub p: f64,
}

impl CanonicalState {
    pub fn from_resonator(r: ResonatorState, delta: f64, p: f64) -> Self {
        Self {
            phi_r: r.phi_r,
            p_r: r.p_r,
            delta,
            p,
        }
    }

    /// Physical charges and fluxes (Q_r, ϕ_r, Q, ϕ) in C and Wb.
    pub fn to_physical(&self) -> (f64, f64, f64, f64) {
        (
            -self.p_r / PHI0,
            PHI0 * self.phi_r,
            -self.p / PHI0,
            PHI0 * self.delta,
        )
    }
}

/// Resonator at zero flux carrying ⟨N⟩ quanta as kinetic energy:
/// p_r²/2m_r = ⟨N⟩·h·f_r with the positive root.
pub fn mr_initial_state(dp: &DimensionlessParams, n_quanta: f64) -> Result<ResonatorState> {
    if n_quanta < 0.0 || !n_quanta.is_finite() {
        return Err(Error::NegativeQuanta(n_quanta));
    }
    let energy = n_quanta * PLANCK * dp.f_r * GHZ;
    Ok(ResonatorState {
        phi_r: 0.0,
        p_r: (2.0 * dp.m_r * energy).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn working() -> DimensionlessParams {
        to_dimensionless(&PhysicalParams::working()).unwrap()
    }

    #[test]
    fn bare_resonator_frequency() {
        assert_relative_eq!(working().f_r, 0.5, max_relative = 1e-3);
    }

    #[test]
    fn reduced_values_match_hand_arithmetic() {
        // φ₀ = ħ/2e, L₀ = φ₀/I₀, evaluated independently of the module.
        let phi0 = 1.054_571_817e-34 / (2.0 * 1.602_176_634e-19);
        let l0 = phi0 / 1.7e-6;
        let dp = working();
        assert_relative_eq!(dp.lambda, 720e-12 / l0, max_relative = 1e-12);
        assert_relative_eq!(dp.lambda, 3.7192, max_relative = 1e-4);
        assert_relative_eq!(dp.lambda_r, 118.807, max_relative = 1e-4);
        assert_relative_eq!(dp.mu, 5.16551, max_relative = 1e-4);
        assert_relative_eq!(dp.delta_cap, 415.179, max_relative = 1e-4);
        assert_relative_eq!(dp.e_j, 844.362, max_relative = 1e-5);
    }

    #[test]
    fn zero_mutual_inductance() {
        let dp = to_dimensionless(&PhysicalParams::working().with_m(0.0)).unwrap();
        assert_eq!(dp.mu, 0.0);
        assert_eq!(dp.delta_cap, dp.lambda * dp.lambda_r);
    }

    #[test]
    fn rejects_degenerate_coupling() {
        let mut pp = PhysicalParams::working();
        pp.m = (pp.l * pp.l_r).sqrt() * 1.0001;
        assert!(matches!(
            to_dimensionless(&pp),
            Err(Error::DegenerateCoupling { .. })
        ));
    }

    #[test]
    fn rejects_non_positive_element() {
        let mut pp = PhysicalParams::working();
        pp.c_r = 0.0;
        assert!(matches!(
            to_dimensionless(&pp),
            Err(Error::NonPositiveElement { name: "Cr", .. })
        ));
        pp = PhysicalParams::working();
        pp.l = -1e-12;
        assert!(to_dimensionless(&pp).is_err());
    }

    #[test]
    fn currents_vanish_at_bias_point() {
        let dp = working();
        let (i, i_r) = currents_from_fluxes(dp.phi_p, 0.0, &dp);
        assert_eq!(i, 0.0);
        assert_eq!(i_r, 0.0);
    }

    #[test]
    fn uncoupled_currents() {
        let dp = to_dimensionless(&PhysicalParams::working().with_m(0.0)).unwrap();
        let (i, i_r) = currents_from_fluxes(dp.phi_p + 0.1, 0.05, &dp);
        assert_relative_eq!(i, PHI0 * 0.1 / 720e-12, max_relative = 1e-12);
        assert_relative_eq!(i_r, PHI0 * 0.05 / 23e-9, max_relative = 1e-12);
    }

    #[test]
    fn flux_round_trip_at_working_point() {
        let dp = working();
        let (phi, phi_r) = (dp.phi_p + 0.1, 0.05);
        let (i, i_r) = currents_from_fluxes(phi, phi_r, &dp);
        let (phi2, phi_r2) = fluxes_from_currents(i, i_r, &dp);
        assert_relative_eq!(phi2, phi, max_relative = 1e-12);
        assert_relative_eq!(phi_r2, phi_r, max_relative = 1e-12);
    }

    #[test]
    fn initial_momentum() {
        let dp = working();
        assert_eq!(mr_initial_state(&dp, 0.0).unwrap().p_r, 0.0);
        // √(2·φ₀²C_r·10·h·f_r) by hand.
        let phi0 = 1.054_571_817e-34 / (2.0 * 1.602_176_634e-19);
        let f_r = 1.0 / (23e-9f64 * 4.4e-12).sqrt() / (2.0 * std::f64::consts::PI);
        let expected = (2.0 * phi0 * phi0 * 4.4e-12 * 10.0 * 6.626_070_15e-34 * f_r).sqrt();
        let p = mr_initial_state(&dp, 10.0).unwrap();
        assert_eq!(p.phi_r, 0.0);
        assert_relative_eq!(p.p_r, expected, max_relative = 1e-12);
        assert_relative_eq!(p.p_r, 1.778e-33, max_relative = 1e-3);
        let ratio = mr_initial_state(&dp, 40.0).unwrap().p_r / p.p_r;
        assert_relative_eq!(ratio, 2.0, max_relative = 1e-14);
        assert!(matches!(
            mr_initial_state(&dp, -1.0),
            Err(Error::NegativeQuanta(_))
        ));
    }

    #[test]
    fn canonical_to_physical() {
        let s = CanonicalState {
            phi_r: 2.0,
            p_r: 3.0e-33,
            delta: 1.5,
            p: -1.0e-33,
        };
        let (q_r, flux_r, q, flux) = s.to_physical();
        assert_relative_eq!(q_r, -3.0e-33 / PHI0);
        assert_relative_eq!(flux_r, 2.0 * PHI0);
        assert_relative_eq!(q, 1.0e-33 / PHI0);
        assert_relative_eq!(flux, 1.5 * PHI0);
    }

    fn params() -> impl Strategy<Value = PhysicalParams> {
        (
            100e-15..2000e-15f64,
            200e-12..2000e-12f64,
            0.5e-6..5e-6f64,
            1e-12..10e-12f64,
            5e-9..50e-9f64,
            0.0..0.95f64,
        )
            .prop_map(|(c, l, i0, c_r, l_r, frac)| PhysicalParams {
                c,
                l,
                i0,
                c_r,
                l_r,
                m: frac * (l * l_r).sqrt(),
                phi_p: 4.992,
                n_quanta: 10.0,
            })
    }

    proptest! {
        #[test]
        fn flux_current_round_trip(pp in params(), dphi in -2.0..2.0f64, phi_r in -5.0..5.0f64) {
            let dp = to_dimensionless(&pp).unwrap();
            let phi = dp.phi_p + dphi;
            let (i, i_r) = currents_from_fluxes(phi, phi_r, &dp);
            let (phi2, phi_r2) = fluxes_from_currents(i, i_r, &dp);
            // Relative to the flux scale in play; cancellation in Δ bounds the accuracy.
            let scale = phi.abs().max(phi_r.abs()).max(1.0);
            prop_assert!((phi2 - phi).abs() <= 1e-12 * scale * (dp.lambda * dp.lambda_r / dp.delta_cap));
            prop_assert!((phi_r2 - phi_r).abs() <= 1e-12 * scale * (dp.lambda * dp.lambda_r / dp.delta_cap));
        }

        #[test]
        fn inductance_scaling(pp in params(), s in 0.2..5.0f64) {
            let mut scaled = pp;
            scaled.l *= s;
            scaled.l_r *= s;
            scaled.m *= s;
            let a = to_dimensionless(&pp).unwrap();
            let b = to_dimensionless(&scaled).unwrap();
            prop_assert!((b.lambda / a.lambda - s).abs() < 1e-12 * s);
            prop_assert!((b.lambda_r / a.lambda_r - s).abs() < 1e-12 * s);
            if a.mu > 0.0 {
                prop_assert!((b.mu / a.mu - s).abs() < 1e-12 * s);
            }
            prop_assert!((b.delta_cap / a.delta_cap - s * s).abs() < 1e-10 * s * s);
        }
    }
}
