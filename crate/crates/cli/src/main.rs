//! Command-line interface: wires molecular models, pulse trains and the
//! experiment drivers together, emitting plot-ready CSV/JSON artifacts and
//! a reproducibility manifest per run.

mod commands;
mod manifest;
mod verify;

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "pecd",
    version,
    about = "Photoelectron circular dichroism: anisotropy tables, dichroism maps, \
             delay scans, bichromatic maps and shaped-pulse optimization"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output directory for data artifacts and the run manifest.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,

    /// Worker threads for parallel scans (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Unit system for emitted pulse-train files.
    #[arg(long, global = true, value_enum, default_value_t = UnitsArg::Lab)]
    pub units: UnitsArg,

    /// Seed recorded in the manifest; drives model generation.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UnitsArg {
    /// Hartree atomic units.
    Au,
    /// eV and femtoseconds.
    Lab,
}

impl UnitsArg {
    pub fn system(self) -> pecd_core::field::UnitSystem {
        match self {
            UnitsArg::Au => pecd_core::field::UnitSystem::Au,
            UnitsArg::Lab => pecd_core::field::UnitSystem::Lab,
        }
    }
}

#[derive(Subcommand)]
pub enum Command {
    /// Anisotropy tables for both helicities.
    Betas {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        pulses: PathBuf,
    },
    /// PECD map, hemisphere averages and peak summary.
    Pecd {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        pulses: PathBuf,
    },
    /// Max |PECD| as a function of the spectral delay between the
    /// high- and low-frequency pulse groups.
    DelayScan {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        pulses: PathBuf,
        /// Frequency cutoff separating the two groups (eV).
        #[arg(long)]
        cutoff_ev: f64,
        #[arg(long, allow_hyphen_values = true)]
        tau_min_fs: f64,
        #[arg(long, allow_hyphen_values = true)]
        tau_max_fs: f64,
        #[arg(long, default_value_t = 121)]
        tau_steps: usize,
    },
    /// PECD and per-pathway panels over fundamental frequency and relative
    /// phase of a bichromatic (ω, 2ω) template.
    BichromaticMap {
        #[arg(long)]
        model: PathBuf,
        /// Two-pulse template with carriers at (ω, 2ω).
        #[arg(long)]
        pulses: PathBuf,
        #[arg(long)]
        omega_min_ev: f64,
        #[arg(long)]
        omega_max_ev: f64,
        #[arg(long, default_value_t = 9)]
        omega_steps: usize,
        #[arg(long, default_value_t = 13)]
        phase_steps: usize,
    },
    /// Derivative-free maximization of the dichroism over the pulse
    /// parameters.
    Optimize {
        #[arg(long)]
        model: PathBuf,
        /// Initial pulse train.
        #[arg(long)]
        pulses: PathBuf,
        /// Optimizer configuration (objective, caps, locks, budget).
        #[arg(long)]
        config: PathBuf,
    },
    /// Oracle-versus-analytic verification suite on shipped toy fixtures.
    Verify {
        /// Optional model file; defaults to a seeded toy model.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Wigner time-frequency map of a pulse train.
    WignerMap {
        #[arg(long)]
        pulses: PathBuf,
        #[arg(long, default_value_t = 96)]
        time_steps: usize,
        #[arg(long, default_value_t = 96)]
        omega_steps: usize,
    },
    /// Deterministic synthetic chiral model.
    GenModel {
        #[arg(long, default_value_t = 4)]
        bound: usize,
        #[arg(long, default_value_t = 3)]
        lmax: u32,
        #[arg(long, default_value_t = 1.0)]
        grid_min_ev: f64,
        #[arg(long, default_value_t = 15.0)]
        grid_max_ev: f64,
        #[arg(long, default_value_t = 32)]
        grid_points: usize,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .ok();
    }
    match commands::run(&cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = if err
                .downcast_ref::<pecd_core::Error>()
                .map(|e| matches!(e, pecd_core::Error::Schema { .. }))
                .unwrap_or(false)
            {
                2
            } else {
                1
            };
            std::process::exit(code);
        }
    }
}
