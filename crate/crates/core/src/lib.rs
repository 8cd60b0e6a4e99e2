// Copyright 2026 The qnd Authors
// SPDX-License-Identifier: Apache-2.0

//! Simulation of the adiabatic non-demolition readout of a flux-biased phase
//! qubit.
//!
//! A single-junction qubit loop is inductively coupled to a quasi-classical
//! LC resonator. The resonator's slow oscillation drags the qubit's double-well
//! potential back and forth; the qubit answers with a state-dependent average
//! phase `⟨δ⟩`, which in turn pulls the resonator frequency. The accumulated
//! resonator phase difference between the two qubit states is the readout
//! signal, and non-adiabatic leakage out of the tracked level bounds the
//! fidelity.
//!
//! The crate is organised bottom-up:
//!
//! * [`circuit`]: element values, reduced parameters, flux/current relations.
//! * [`spectrum`]: instantaneous left-well eigenproblem of the qubit.
//! * [`table`]: spectra tabulated along the resonator flux and interpolated.
//! * [`resonator`]: back-action curve, resonator dynamics, phase extraction.
//! * [`dynamics`]: amplitudes in the moving eigenbasis and fidelities.
//! * [`oracle`]: direct wave-packet propagation used to cross-check `dynamics`.
//! * [`analysis`]: full pipeline per parameter point, sweeps, budgets.
//!
//! Internal units: energies are frequencies `E/h` in GHz, times are in ns,
//! phases and reduced fluxes are dimensionless. Momenta stay in J·s.

// `!(x > 0.0)` is how NaN inputs get rejected; index loops read better
// than iterator chains in the numerical kernels.
#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::needless_range_loop,
    clippy::unnecessary_map_or
)]

pub mod analysis;
pub mod circuit;
pub mod config;
pub mod dynamics;
mod error;
pub mod linalg;
pub mod oracle;
pub mod report;
pub mod resonator;
pub mod roots;
pub mod spectrum;
pub mod spline;
pub mod table;
pub mod units;

pub use analysis::{FailureStatus, SweepRow, UncertaintyBudget};
pub use circuit::{CanonicalState, DimensionlessParams, PhysicalParams, ResonatorState};
pub use dynamics::{AmplitudeTrajectory, FidelityReport};
pub use error::{Error, Result};
pub use resonator::{ResonatorTrajectory, ResponseCurve};
pub use spectrum::{GridSpec, InstantSpectrum, WellGeometry};
pub use table::SpectralTable;
