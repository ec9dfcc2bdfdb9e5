//! `kgscope`: command-line driver for the Klein-Gordon resonance laboratory.
//!
//! Every command writes its outputs and a `manifest.json` into `--out`.
//! Exit codes: 0 success, 2 hypotheses violated (outputs still written),
//! 64 usage or configuration error, 70 numeric failure.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kgscope::PhaseTriple;

use crate::output::Failure;

#[derive(Parser, Debug)]
#[command(name = "kgscope", version, about, long_about = None)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// JSON configuration document.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,

    /// Monte-Carlo seed.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker thread cap.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Repeat scans at doubled resolution and report the change.
    #[arg(long, global = true)]
    pub refine: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Nondegeneracy conditions, radial critical curves and roots of Ψ.
    Analyze(AnalyzeArgs),
    /// Scanned lower bounds of the phase and its gradients.
    VerifyLemmas(VerifyArgs),
    /// Pseudospectral evolution with a diagnostics CSV.
    Simulate,
    /// Z norm of stored Fourier fields.
    Znorm(ZnormArgs),
    /// Iterated-Duhamel growth experiment.
    Growth(GrowthArgs),
    /// Monte-Carlo volumes of phase sublevel sets.
    Volume(VolumeArgs),
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Largest radius of the Ψ scan.
    #[arg(long, default_value_t = 20.0)]
    pub s_max: f64,

    /// Radii in the Ψ scan.
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Check to run; repeat for several. Defaults to all.
    #[arg(long = "lemma")]
    pub lemmas: Vec<String>,

    #[arg(long, allow_hyphen_values = true)]
    pub k_lo: Option<i32>,

    #[arg(long, allow_hyphen_values = true)]
    pub k_hi: Option<i32>,

    /// Radial nodes per octave.
    #[arg(long)]
    pub per_octave: Option<usize>,

    /// Angular nodes on [0, π].
    #[arg(long)]
    pub n_theta: Option<usize>,

    /// Threshold index between the low- and high-frequency regions.
    #[arg(long, allow_hyphen_values = true)]
    pub d0: Option<i32>,
}

#[derive(Args, Debug)]
pub struct ZnormArgs {
    /// Field file of one species; repeat in species order.
    #[arg(long = "field", required = true)]
    pub fields: Vec<PathBuf>,

    /// JSON document of dyadic parameters.
    #[arg(long)]
    pub params: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GrowthArgs {
    /// JSON iteration spec; flags below override its fields.
    #[arg(long)]
    pub spec: Option<PathBuf>,

    #[arg(long, allow_hyphen_values = true)]
    pub triple: Option<PhaseTriple>,

    /// Localization indices, one report each.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
    pub j: Vec<i32>,

    #[arg(long, default_value_t = 2)]
    pub rounds: usize,

    /// Replace the phase by zero.
    #[arg(long)]
    pub zero_phase: bool,
}

#[derive(Args, Debug)]
pub struct VolumeArgs {
    #[arg(long, allow_hyphen_values = true, default_value = "2,1,1")]
    pub triple: PhaseTriple,

    #[arg(long, value_enum, default_value = "phi")]
    pub quantity: QuantityArg,

    /// Thresholds ε, each in (0, 1/2].
    #[arg(long, value_delimiter = ',', default_value = "0.125,0.0625,0.03125,0.015625")]
    pub eps: Vec<f64>,

    /// Frequency scale 2^k of the box.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
    pub k: i32,

    /// Inner samples per outer point.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,

    #[arg(long, default_value_t = 32)]
    pub outer_samples: usize,

    /// ε' of the Υ restriction.
    #[arg(long, default_value_t = 0.5)]
    pub eps_prime: f64,

    /// Gradient floor exponent of the Υ restriction.
    #[arg(long, default_value_t = 4.0)]
    pub d0: f64,

    /// Bound on the angular derivative.
    #[arg(long, default_value_t = 1.0)]
    pub kappa: f64,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
pub enum QuantityArg {
    Phi,
    PhiUpsilon,
    PhiOmega,
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("kgscope: cannot set thread count: {e}");
            return ExitCode::from(64);
        }
    }
    match commands::run(&cli, &argv[1..]) {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, message }) => {
            eprintln!("kgscope: {message}");
            ExitCode::from(code)
        }
    }
}
