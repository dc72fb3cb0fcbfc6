mod commands;

use clap::{ArgGroup, Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Harmonic-oscillator wave packets: moments, closed forms and rigidity.
#[derive(Parser, Debug)]
#[command(name = "rigidpack", version)]
struct Cli {
    #[command(flatten)]
    units: UnitArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct UnitArgs {
    /// Mass (overrides the spec file).
    #[arg(long, global = true, help_heading = "Units")]
    mu: Option<f64>,
    /// Angular frequency (overrides the spec file).
    #[arg(long, global = true, help_heading = "Units")]
    omega: Option<f64>,
    /// Reduced Planck constant (overrides the spec file).
    #[arg(long, global = true, help_heading = "Units")]
    hbar: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a packet of prescribed degree of rigidity.
    Generate(GenerateArgs),
    /// Sample a moment over time with one engine, or compare two.
    Moments(MomentsArgs),
    /// Measure the degree of rigidity of a packet.
    Classify(ClassifyArgs),
    /// Run the built-in consistency checks.
    Verify(VerifyArgs),
    /// Dump the grid wave function at a time as CSV.
    OracleDump(OracleDumpArgs),
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// Target degree N; indices must be at least N+1 apart.
    #[arg(long)]
    degree: usize,
    #[arg(long, default_value = "even")]
    parity: String,
    /// Comma-separated indices n_i (levels 2n_i or 2n_i+1).
    #[arg(long, value_delimiter = ',')]
    indices: Vec<usize>,
    /// Comma-separated real amplitudes (default: equal weights).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    amplitudes: Vec<f64>,
    /// Random complex amplitudes (and indices, when none are given).
    #[arg(long)]
    random: bool,
    /// Number of terms for random indices.
    #[arg(long, default_value_t = 2)]
    terms: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    x0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    p0: f64,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("quantity").required(true).multiple(false)))]
pub struct MomentsArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Q_K = <(x - x̄)^K>.
    #[arg(long = "Q", group = "quantity")]
    q: Option<usize>,
    /// P_L = <(p - p̄)^L>.
    #[arg(long = "P", group = "quantity")]
    p: Option<usize>,
    /// R_kl as "k,l".
    #[arg(long = "R", group = "quantity")]
    r: Option<String>,
    /// S_kl as "k,l".
    #[arg(long = "S", group = "quantity")]
    s: Option<String>,
    /// Any moment by name, e.g. Q4, R1,3, S31.
    #[arg(long, group = "quantity")]
    moment: Option<String>,
    #[arg(long, default_value = "spectral", conflicts_with = "compare")]
    engine: String,
    /// Two engines, "a,b": prints a and a − b.
    #[arg(long)]
    compare: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    periods: f64,
    #[arg(long, default_value_t = 256)]
    samples: usize,
    #[arg(long, default_value_t = 4096)]
    ode_steps: usize,
    #[arg(long, default_value_t = 4096)]
    grid_points: usize,
    #[arg(long, default_value_t = 4096)]
    grid_steps: usize,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value_t = 10)]
    k_max: usize,
    #[arg(long, default_value_t = 64)]
    samples: usize,
    #[arg(long, default_value_t = rigidpack::rigidity::DEFAULT_TOL_REL)]
    tol: f64,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Comma-separated subset of: conservation, parity, s-identities,
    /// closedform, rigidity, oracle, hierarchy.
    #[arg(long, value_delimiter = ',')]
    checks: Vec<String>,
    /// Check this packet instead of a random ensemble.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    ensemble: usize,
    #[arg(long, default_value_t = 32)]
    samples: usize,
    /// Grid points, also the split-operator steps per period.
    #[arg(long, default_value_t = 8192)]
    grid_points: usize,
}

#[derive(Args, Debug)]
pub struct OracleDumpArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Time in units of the period.
    #[arg(long, default_value_t = 0.0)]
    periods: f64,
    #[arg(long, default_value_t = 4096)]
    grid_points: usize,
    #[arg(long, default_value_t = 4096)]
    steps_per_period: usize,
    /// Box half-width in oscillator lengths.
    #[arg(long, default_value_t = 16.0)]
    half_width: f64,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { commands::EXIT_REQUEST } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Generate(a) => commands::generate(a, cli.units),
        Command::Moments(a) => commands::moments(a, cli.units),
        Command::Classify(a) => commands::classify(a, cli.units),
        Command::Verify(a) => commands::verify(a, cli.units),
        Command::OracleDump(a) => commands::oracle_dump(a, cli.units),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
