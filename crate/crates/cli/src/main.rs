// Copyright 2026 The qnd Authors
// SPDX-License-Identifier: Apache-2.0

//! `qnd`: spectra, resonator phase, readout fidelity, tables and sweeps for a
//! flux-biased phase qubit read out through an LC resonator.

mod commands;
mod quantity;

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use qnd_core::analysis::RunSettings;
use qnd_core::config::load_params;
use qnd_core::{GridSpec, PhysicalParams};

use crate::quantity::{parse, Kind};

fn capacitance(s: &str) -> Result<f64, quantity::QuantityError> {
    parse(s, Kind::Capacitance)
}

fn inductance(s: &str) -> Result<f64, quantity::QuantityError> {
    parse(s, Kind::Inductance)
}

fn current(s: &str) -> Result<f64, quantity::QuantityError> {
    parse(s, Kind::Current)
}

fn time(s: &str) -> Result<f64, quantity::QuantityError> {
    parse(s, Kind::Time)
}

#[derive(Debug, Parser)]
#[command(
    name = "qnd",
    version,
    about = "Adiabatic non-demolition readout of a phase qubit"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Parameters and numerics shared by every subcommand.
#[derive(Debug, Clone, Args)]
struct Common {
    /// Key-value parameter file (C_fF, L_pH, I0_uA, Cr_pF, Lr_nH, M_nH, phi_p, n_quanta).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Junction capacitance, e.g. 700fF.
    #[arg(long = "C", global = true, value_parser = capacitance)]
    c: Option<f64>,
    /// Qubit-loop inductance, e.g. 720pH.
    #[arg(long = "L", global = true, value_parser = inductance)]
    l: Option<f64>,
    /// Critical current, e.g. 1.7uA.
    #[arg(long = "I0", global = true, value_parser = current)]
    i0: Option<f64>,
    /// Resonator capacitance, e.g. 4.4pF.
    #[arg(long = "Cr", global = true, value_parser = capacitance)]
    c_r: Option<f64>,
    /// Resonator inductance, e.g. 23nH.
    #[arg(long = "Lr", global = true, value_parser = inductance)]
    l_r: Option<f64>,
    /// Mutual inductance, e.g. 1nH.
    #[arg(long = "M", global = true, value_parser = inductance)]
    m: Option<f64>,
    /// Flux bias of the qubit loop in units of ħ/2e.
    #[arg(long, global = true)]
    phi_p: Option<f64>,
    /// Mean number of resonator quanta.
    #[arg(long, global = true)]
    n_quanta: Option<f64>,

    /// Fixed number of grid points (default: refine until converged).
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Flux spacing of the spectral table.
    #[arg(long, global = true)]
    flux_step: Option<f64>,
    /// Amplitude step, e.g. 1ps.
    #[arg(long, global = true, value_parser = time)]
    dt: Option<f64>,
    /// Resonator integration step, e.g. 1ps.
    #[arg(long, global = true, value_parser = time)]
    dt_resonator: Option<f64>,
    /// Fidelity averaging window, e.g. 10ns.
    #[arg(long, global = true, value_parser = time)]
    t_a: Option<f64>,
    /// Skip the step-halving check of the amplitude evolution.
    #[arg(long, global = true)]
    no_step_check: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Left-well spectrum and wavefunctions at one resonator flux.
    Spectrum {
        /// Resonator flux in units of ħ/2e.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        phi_r: f64,
        /// Number of levels to dump (default: all left-well levels).
        #[arg(long)]
        levels: Option<usize>,
    },
    /// Resonator trajectories and the phase difference between qubit states.
    Phase {
        /// Length of the resonator runs.
        #[arg(long, value_parser = time, default_value = "100ns")]
        t_end: f64,
    },
    /// Readout fidelities of both qubit states.
    Fidelity {
        /// Length of the amplitude runs (at least the averaging window).
        #[arg(long, value_parser = time)]
        t_end: Option<f64>,
        /// Also compare with direct propagation over `--oracle-t-end`.
        #[arg(long)]
        oracle_check: bool,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Tables of level counts and fidelities, relaxation times and
    /// reproducibility targets.
    Tables {
        /// Which tables to produce (1, 2, 3); default all.
        #[arg(long, value_delimiter = ',')]
        which: Vec<u8>,
        /// Required F1 of the reproducibility table.
        #[arg(long = "F1-req", default_value_t = 0.9985)]
        f1_req: f64,
        /// Measurement time of the relaxation table.
        #[arg(long, value_parser = time, default_value = "100ns")]
        t_m: f64,
        /// Mutual inductances of the level-count table.
        #[arg(long, value_delimiter = ',', value_parser = inductance,
              default_value = "0.5nH,1.0nH,1.5nH,1.8nH,2.0nH")]
        m_values: Vec<f64>,
        /// Worker threads.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Fidelities and phase difference against one circuit parameter.
    Sweep {
        /// C, L, I0, Cr, Lr or M.
        #[arg(long)]
        param: String,
        /// `<lo>:<hi><unit>`; default ±30% around the base value.
        #[arg(long)]
        range: Option<String>,
        #[arg(long, default_value_t = 7)]
        points: usize,
        /// Mutual inductances to repeat the sweep for (ignored when sweeping M).
        #[arg(long, value_delimiter = ',', value_parser = inductance, default_value = "1.0nH,1.8nH")]
        m_variants: Vec<f64>,
        /// Worker threads.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Moving-basis amplitudes against direct split-step propagation.
    OracleCheck {
        #[command(flatten)]
        oracle: OracleArgs,
    },
}

#[derive(Debug, Clone, Args)]
struct OracleArgs {
    /// Length of the comparison.
    #[arg(long = "oracle-t-end", value_parser = time, default_value = "1ns")]
    t_end: f64,
    /// Split-step time step.
    #[arg(long = "oracle-dt", value_parser = time, default_value = "0.1ps")]
    dt: f64,
    /// Grid points of the split-step domain.
    #[arg(long = "oracle-points", default_value_t = 2048)]
    points: usize,
    /// Comparison times.
    #[arg(long = "oracle-snapshots", default_value_t = 10)]
    snapshots: usize,
}

impl Common {
    fn params(&self) -> Result<PhysicalParams> {
        let mut pp = match &self.config {
            Some(path) => load_params(path).with_context(|| format!("reading {}", path.display()))?,
            None => PhysicalParams::working(),
        };
        let overrides = [
            ("C", self.c),
            ("L", self.l),
            ("I0", self.i0),
            ("Cr", self.c_r),
            ("Lr", self.l_r),
            ("M", self.m),
            ("phi_p", self.phi_p),
            ("n_quanta", self.n_quanta),
        ];
        for (name, value) in overrides {
            if let Some(v) = value {
                pp.set(name, v)?;
            }
        }
        pp.validate()?;
        Ok(pp)
    }

    fn settings(&self) -> RunSettings {
        let mut s = RunSettings::default();
        if let Some(points) = self.grid {
            s.grid = GridSpec::fixed(points);
        }
        if let Some(step) = self.flux_step {
            s.flux_step = step;
        }
        if let Some(dt) = self.dt {
            s.evolve.dt = dt;
        }
        if let Some(dt) = self.dt_resonator {
            s.dt_resonator = dt;
        }
        if let Some(t_a) = self.t_a {
            s.t_a = t_a;
        }
        s.evolve.check_step = !self.no_step_check;
        s
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let pp = cli.common.params()?;
    let settings = cli.common.settings();
    std::fs::create_dir_all(&cli.common.out)
        .with_context(|| format!("creating {}", cli.common.out.display()))?;
    let ctx = commands::Context {
        params: pp,
        settings,
        out: cli.common.out.clone(),
    };
    let summary = match cli.command {
        Command::Spectrum { phi_r, levels } => commands::spectrum(&ctx, phi_r, levels)?,
        Command::Phase { t_end } => commands::phase(&ctx, t_end)?,
        Command::Fidelity {
            t_end,
            oracle_check,
            oracle,
        } => commands::fidelity(&ctx, t_end, oracle_check.then(|| oracle.into()))?,
        Command::Tables {
            which,
            f1_req,
            t_m,
            m_values,
            jobs,
        } => commands::tables(&ctx, &which, f1_req, t_m, &m_values, jobs)?,
        Command::Sweep {
            param,
            range,
            points,
            m_variants,
            jobs,
        } => commands::sweep(&ctx, &param, range.as_deref(), points, &m_variants, jobs)?,
        Command::OracleCheck { oracle } => commands::oracle_check(&ctx, &oracle.into())?,
    };
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

impl From<OracleArgs> for commands::OracleOptions {
    fn from(a: OracleArgs) -> Self {
        Self {
            t_end: a.t_end,
            dt: a.dt,
            points: a.points,
            snapshots: a.snapshots,
        }
    }
}
