use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "hypercube-pst", version, about = "State transfer on hypercube networks of phase qubits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Adjacency matrix and spectrum of the d-cube.
    Topology,
    /// Transfer error against coupling strength, with and without the row correction.
    Fig2,
    /// Target population under decay and dephasing: integrator against closed form.
    Fig3,
    /// Disorder-averaged fidelity with Gaussian and localization fits.
    Fig4,
    /// Decoherent fidelity, its state average, and the lower bound.
    Bound,
    /// Frequency assignment that isolates the subcube spanned by --a and --b.
    Program,
    /// Disorder ensembles without fits.
    Disorder,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Topology => "topology",
            Command::Fig2 => "fig2",
            Command::Fig3 => "fig3",
            Command::Fig4 => "fig4",
            Command::Bound => "bound",
            Command::Program => "program",
            Command::Disorder => "disorder",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

/// Every flag, all optional so that config-file values can fill the gaps.
#[derive(Args, Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Options {
    /// Hypercube dimension(s), comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub d: Option<Vec<u32>>,
    /// Coupling parameter(s), comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub zeta: Option<Vec<f64>>,
    /// Qubit frequency omega_0 / 2 pi in GHz.
    #[arg(long, global = true)]
    pub omega_ghz: Option<f64>,

    /// Junction capacitance in pF (circuit input, replaces --zeta and --omega-ghz).
    #[arg(long, global = true)]
    pub cx_pf: Option<f64>,
    /// Coupling capacitance in fF.
    #[arg(long, global = true)]
    pub cc_ff: Option<f64>,
    /// Critical current in uA.
    #[arg(long, global = true)]
    pub ic_ua: Option<f64>,
    /// Bias current in uA.
    #[arg(long, global = true)]
    pub bias_ua: Option<f64>,

    /// Energy relaxation time in ns ("inf" for none).
    #[arg(long, global = true)]
    pub t1_ns: Option<f64>,
    /// Pure dephasing time in ns ("inf" for none).
    #[arg(long, global = true)]
    pub tphi_ns: Option<f64>,

    /// Absolute coupling disorder half-width(s).
    #[arg(long, global = true, value_delimiter = ',', conflicts_with = "relative_delta")]
    pub delta_zeta: Option<Vec<f64>>,
    /// Coupling disorder half-width(s) as a fraction of zeta.
    #[arg(long, global = true, value_delimiter = ',')]
    pub relative_delta: Option<Vec<f64>>,
    /// Monte Carlo trials per ensemble (default depends on d).
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Coupling series order.
    #[arg(long, global = true)]
    pub order: Option<u32>,
    /// Apply the quadratic row-frequency correction.
    #[arg(long, global = true)]
    #[serde(default)]
    pub corrected: bool,

    /// Source node as a bit string.
    #[arg(long, global = true)]
    pub a: Option<String>,
    /// Target node as a bit string.
    #[arg(long, global = true)]
    pub b: Option<String>,
    /// Detuning of programmed-out nodes in units of zeta omega_0.
    #[arg(long, global = true)]
    pub detuning_factor: Option<f64>,

    /// Time points for fig3.
    #[arg(long, global = true)]
    pub points: Option<usize>,
    /// Emit every trial fidelity.
    #[arg(long, global = true)]
    #[serde(default)]
    pub per_trial: bool,
    /// Topology: spectrum only, no adjacency matrix.
    #[arg(long, global = true)]
    #[serde(default)]
    pub spectrum: bool,

    /// Output file (stdout if absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Leave the generation time out of the output.
    #[arg(long, global = true)]
    #[serde(default)]
    pub no_timestamp: bool,
    /// JSON file with default values for any of these flags.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}
