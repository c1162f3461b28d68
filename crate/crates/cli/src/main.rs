//! `pauli-derand`: build, simulate, estimate and benchmark Pauli measurement
//! schedules from the command line.
//!
//! Exit codes: 0 on success, 1 for runtime and capacity failures, 2 for usage
//! and parse errors.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Thread count override for parallel bench trials.
const THREADS_ENV: &str = "PAULI_DERAND_THREADS";

#[derive(Parser, Debug)]
#[command(name = "pauli-derand", version, about = "Derandomized Pauli measurement schedules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a deterministic measurement schedule for a set of observables.
    Derandomize(DerandomizeArgs),
    /// Measure a state with every row of a schedule.
    Simulate(SimulateArgs),
    /// Estimate observables and energy from measurement outcomes.
    Estimate(EstimateArgs),
    /// Compare derandomized and randomized schedules on a Hamiltonian's ground state.
    Bench(BenchArgs),
    /// Confidence bound of a schedule, its random-schedule expectation and hit counts.
    Confidence(ConfidenceArgs),
}

#[derive(Args, Debug)]
struct DerandomizeArgs {
    /// Observables file, one `[coefficient] pauli_string` per line.
    observables: PathBuf,
    /// Fixed number of rows; requires --epsilon.
    #[arg(long, conflicts_with_all = ["min_hits", "cap"], required_unless_present = "min_hits")]
    budget: Option<usize>,
    /// Stop once every observable is hit this often (budget-free cost).
    #[arg(long, requires = "cap")]
    min_hits: Option<usize>,
    /// Row cap for --min-hits.
    #[arg(long)]
    cap: Option<usize>,
    /// Accuracy of the fixed-budget cost.
    #[arg(long, conflicts_with_all = ["eta", "min_hits"])]
    epsilon: Option<f64>,
    /// Failure probability recorded with the fixed-budget cost.
    #[arg(long, default_value_t = 0.05, conflicts_with = "min_hits")]
    delta: f64,
    /// Exponent scale of the budget-free cost.
    #[arg(long)]
    eta: Option<f64>,
    /// Weight the budget-free cost by |coefficient|.
    #[arg(long, requires = "min_hits")]
    weighted: bool,
    /// Schedule output; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Schedule file, one basis string per line.
    schedule: PathBuf,
    /// `zero`, `plus`, `ghz`, or `product:<q1>,<q2>,...` with each qubit given
    /// as `X+`, `Z-`, ... or `theta:phi`.
    #[arg(long, default_value = "zero", conflicts_with = "state_file")]
    state: String,
    /// Raw state file: qubit count, then one `real imag` amplitude per line.
    #[arg(long)]
    state_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Outcomes output; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Kv,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    observables: PathBuf,
    outcomes: PathBuf,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Format of the report on stdout.
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    format: ReportFormat,
    /// Also write the key/value report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum EigenArg {
    Auto,
    Dense,
    Lanczos,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Hamiltonian file in the observables format.
    hamiltonian: PathBuf,
    /// Comma-separated list of measurement budgets.
    #[arg(long, value_delimiter = ',', required = true)]
    budget: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "derand,random")]
    methods: Vec<String>,
    /// Exponent scale of the budget-free cost used for the derandomized schedule.
    #[arg(long, default_value_t = 0.9)]
    eta: f64,
    /// Use the unweighted budget-free cost.
    #[arg(long)]
    unweighted: bool,
    #[arg(long, value_enum, default_value_t = EigenArg::Auto)]
    eigen: EigenArg,
    /// Largest qubit count accepted by the ground-state solver.
    #[arg(long)]
    max_qubits: Option<usize>,
    /// Directory for cached derandomized schedules.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    format: ReportFormat,
    /// Also write the key/value report, including per-trial energies, here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ConfidenceArgs {
    observables: PathBuf,
    schedule: PathBuf,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(value) = std::env::var(THREADS_ENV) {
        let threads: usize = value
            .trim()
            .parse()
            .map_err(|_| commands::usage(format!("{THREADS_ENV} must be a thread count, got {value:?}")))?;
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().collect();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Derandomize(args) => commands::derandomize(&args, &argv),
        Command::Simulate(args) => commands::simulate(&args, &argv),
        Command::Estimate(args) => commands::estimate(&args, &argv),
        Command::Bench(args) => commands::bench(&args, &argv),
        Command::Confidence(args) => commands::confidence(&args),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
