use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "qlab", version, about = "Seeded single-qubit measurement and ion-chain experiments")]
pub struct Cli {
    /// Master seed of every stochastic step.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output file; standard output if absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// JSON file with defaults for any flag. Flags given on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fractionated-pulse survival or run-length statistics under repeated probing.
    Zeno(ZenoParams),
    /// Monte-Carlo mean fidelity of a state-estimation strategy.
    Estimate(EstimateParams),
    /// Tomography of an affine channel described in a JSON file.
    Channel(ChannelParams),
    /// Equilibrium, modes and spin-spin couplings of an ion string.
    Chain(ChainParams),
    /// Rabi oscillation or Ramsey fringe curve.
    Rabi(RabiParams),
}

/// Declares a parameter record whose fields are all optional, usable both as
/// clap arguments and as a section of the JSON config file.
macro_rules! params {
    ($(#[$meta:meta])* pub struct $name:ident { $( $(#[$fmeta:meta])* pub $field:ident : $ty:ty ),* $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Default, PartialEq, clap::Args, Serialize, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct $name {
            $( $(#[$fmeta])* pub $field: Option<$ty>, )*
        }

        impl $name {
            /// Fields set in `self` take precedence over `base`.
            pub fn over(self, base: Self) -> Self {
                $name { $( $field: self.$field.or(base.$field), )* }
            }
        }
    };
}

params! {
    pub struct ZenoParams {
        /// Comma-separated numbers of drive fractions.
        #[arg(long, value_delimiter = ',')]
        pub fractions: Vec<u32>,
        /// Repetitions per fraction count [default: 2000/N].
        #[arg(long)]
        pub sequences: u32,
        /// Total nutation angle of the fractionated drive, rad [default: π].
        #[arg(long)]
        pub total_area: f64,
        /// Probability that preparation yields the lower level.
        #[arg(long)]
        pub prep: f64,
        #[arg(long)]
        pub eta0: f64,
        #[arg(long)]
        pub eta1: f64,
        /// Mean photon count of a bright ion; enables photon-counting read-out.
        #[arg(long)]
        pub on_mean: f64,
        #[arg(long)]
        pub off_mean: f64,
        /// Upper bound on the bright-ion misread rate used to pick the threshold.
        #[arg(long)]
        pub max_misread: f64,
        /// Length of an alternating drive/probe series; switches to run-length statistics.
        #[arg(long)]
        pub pairs: usize,
        /// Nutation angle per drive step in run-length mode, rad.
        #[arg(long)]
        pub theta: f64,
        /// Largest run length reported.
        #[arg(long)]
        pub max_q: usize,
    }
}

params! {
    pub struct EstimateParams {
        /// self | random | fixed
        #[arg(long)]
        pub strategy: String,
        /// Measurements per state.
        #[arg(long)]
        pub n: usize,
        /// Number of random pure states.
        #[arg(long)]
        pub states: usize,
        /// Depolarization applied before each measurement.
        #[arg(long)]
        pub lambda: f64,
        /// Read-out bias (η₁ − η₀)/2.
        #[arg(long, allow_hyphen_values = true)]
        pub delta_eta: f64,
        #[arg(long)]
        pub n_theta: usize,
        #[arg(long)]
        pub n_phi: usize,
    }
}

params! {
    pub struct ChannelParams {
        /// JSON channel description.
        #[arg(long)]
        pub spec: PathBuf,
        /// Shots per tomography setting; exact reconstruction if absent.
        #[arg(long)]
        pub shots: u64,
    }
}

params! {
    pub struct ChainParams {
        #[arg(long)]
        pub species: String,
        /// Number of ions.
        #[arg(long)]
        pub n: usize,
        /// Axial centre-of-mass frequency ν₁/2π, kHz.
        #[arg(long)]
        pub nu1_khz: f64,
        /// Axial field gradient, T/m.
        #[arg(long)]
        pub gradient: f64,
        /// Field at the trap centre, T; weak-field limit if absent.
        #[arg(long)]
        pub b0: f64,
        /// Print the coupling constants as a text table.
        #[arg(long, num_args = 0..=1, default_missing_value = "true")]
        pub table: bool,
    }
}

params! {
    pub struct RabiParams {
        /// Rabi frequency Ω/2π, Hz.
        #[arg(long)]
        pub rabi_hz: f64,
        /// Detuning δ/2π, Hz.
        #[arg(long, allow_hyphen_values = true)]
        pub detuning_hz: f64,
        /// End of the time axis, s.
        #[arg(long)]
        pub t_max: f64,
        #[arg(long)]
        pub points: usize,
        /// Scan the free-precession time between two π/2 pulses instead of the drive time.
        #[arg(long, num_args = 0..=1, default_missing_value = "true")]
        pub ramsey: bool,
    }
}

/// Contents of a `--config` file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub zeno: Option<ZenoParams>,
    pub estimate: Option<EstimateParams>,
    pub channel: Option<ChannelParams>,
    pub chain: Option<ChainParams>,
    pub rabi: Option<RabiParams>,
}
