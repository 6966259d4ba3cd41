//! `catodyne`: photon-counting homodyne statistics with coherent and cat
//! local oscillators, written as CSV with JSON manifests.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use catodyne_core::{CatParity, LocalOscillator, SignalState};

#[derive(Debug, Parser)]
#[command(name = "catodyne", version, about, allow_negative_numbers = true)]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, env = "CATODYNE_OUT", default_value = ".")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Joint click distribution P(n, m).
    Clicks(DistArgs),
    /// Difference/sum lattice with both marginals and a parity report.
    Sumdiff(DistArgs),
    /// Strong-oscillator density on a grid.
    Asymptote(AsymptoteArgs),
    /// Conditional wavefunction from remote cat preparation.
    RemotePrep(RemotePrepArgs),
    /// Outcome density of the remote-preparation measurement.
    Prq(PrqArgs),
    /// Distance to the limiting density across oscillator strengths.
    Sweep(SweepArgs),
    /// Closed-form amplitudes against the Fock-space oracle.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct DistArgs {
    /// Oscillator: coherent|cat+|cat-|mixed:MAG[,THETA].
    #[arg(long, value_parser = parse_lo)]
    lo: LocalOscillator,
    /// Signal: vacuum, coherent:RE[,IM] or fock:K.
    #[arg(long, value_parser = parse_signal, default_value = "vacuum")]
    signal: SignalState,
    /// Grid size per detector; chosen from the photon-number tail if omitted.
    #[arg(long)]
    n_max: Option<usize>,
    /// Detector efficiency.
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Projector,
    Reflection,
}

#[derive(Debug, Args)]
struct AsymptoteArgs {
    #[arg(long, value_enum, default_value_t = KindArg::Projector)]
    kind: KindArg,
    /// Quadrature angle in radians.
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    #[arg(long, value_parser = parse_signal, default_value = "vacuum")]
    signal: SignalState,
    #[arg(long, default_value_t = -6.0)]
    x_min: f64,
    #[arg(long, default_value_t = 6.0)]
    x_max: f64,
    #[arg(long, default_value_t = 1201)]
    points: usize,
}

#[derive(Debug, Args)]
struct Squeezing {
    /// Squeezing parameter r.
    #[arg(long, conflicts_with = "r_db", required_unless_present = "r_db")]
    r: Option<f64>,
    /// Squeezing in dB, 10 log10 e^{2r}.
    #[arg(long)]
    r_db: Option<f64>,
}

#[derive(Debug, Args)]
struct RemotePrepArgs {
    /// Position outcome.
    #[arg(long)]
    q: f64,
    /// Parity bit: + or -.
    #[arg(long, value_parser = parse_parity, allow_hyphen_values = true, default_value = "+")]
    parity: CatParity,
    #[command(flatten)]
    squeezing: Squeezing,
    #[arg(long, requires_all = ["x_max", "step"])]
    x_min: Option<f64>,
    #[arg(long)]
    x_max: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
}

#[derive(Debug, Args)]
struct PrqArgs {
    #[command(flatten)]
    squeezing: Squeezing,
    /// Outcomes span [−q_max, q_max].
    #[arg(long, default_value_t = 3.0)]
    q_max: f64,
    #[arg(long, default_value_t = 601)]
    points: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LoKindArg {
    Coherent,
    #[value(name = "cat+")]
    CatPlus,
    #[value(name = "cat-")]
    CatMinus,
    Mixed,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_enum, default_value_t = LoKindArg::Coherent)]
    lo_kind: LoKindArg,
    #[arg(long, value_parser = parse_signal, default_value = "vacuum")]
    signal: SignalState,
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,6")]
    betas: Vec<f64>,
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    beta: f64,
    #[arg(long, value_delimiter = ',', value_parser = parse_signal,
          default_value = "vacuum,coherent:0.8,coherent:1.6,fock:1,fock:2,fock:3")]
    signals: Vec<SignalState>,
    /// Largest n + m compared.
    #[arg(long, default_value_t = 40)]
    max_total: u64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

fn parse_lo(s: &str) -> Result<LocalOscillator, String> {
    s.parse().map_err(|e: catodyne_core::Error| e.to_string())
}

fn parse_signal(s: &str) -> Result<SignalState, String> {
    s.parse().map_err(|e: catodyne_core::Error| e.to_string())
}

fn parse_parity(s: &str) -> Result<CatParity, String> {
    match s {
        "+" | "plus" | "even" => Ok(CatParity::Plus),
        "-" | "minus" | "odd" => Ok(CatParity::Minus),
        _ => Err(format!("parity must be + or -, got {s:?}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(commands::exit_code(&err))
        }
    }
}
