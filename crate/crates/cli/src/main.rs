//! `selfstab`: simulate, solve and analyse self-stabilizing jump processes.
// Range checks are written as negated comparisons so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use selfstab::sim::{PlanFormula, Variant};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] selfstab::Error),
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io { context: context.into(), source }
    }

    /// 2 for configuration, input and IO problems; 3 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        use selfstab::Error as E;
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Core(e) => match e {
                E::Io(_)
                | E::Json(_)
                | E::Parse { .. }
                | E::InvariantViolation { .. }
                | E::InvalidArgument(_)
                | E::InvalidModel(_)
                | E::MissingBound
                | E::Expression { .. } => 2,
                E::Infeasible(_)
                | E::NotContractive { .. }
                | E::NoConvergence { .. }
                | E::QuadratureFailure { .. }
                | E::RangeViolation { .. }
                | E::Domain(_)
                | E::AllIncrementsZero
                | E::InsufficientScales { .. }
                | E::EmptySample
                | E::TooFewPoints
                | E::OutOfInterval { .. } => 3,
            },
        }
    }
}

#[derive(Parser)]
#[command(name = "selfstab", version, about = "Simulation of self-stabilizing jump processes")]
struct Cli {
    /// Output directory (overrides the config and SELFSTAB_OUT_DIR).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one or more paths and write CSV, SVG and a manifest.
    Simulate(RunArgs),
    /// Truncation level N for a target accuracy epsilon.
    Plan(PlanArgs),
    /// Solve the jump equation on a user-supplied point set.
    Solve(SolveArgs),
    /// Generate or convert point sets.
    #[command(subcommand)]
    Points(PointsCommand),
    /// Localization experiment: KS distance of scaled increments to the stable law.
    Localize(RunArgs),
    /// Hölder exponent fits on simulated paths.
    Holder(RunArgs),
    /// Simulate the tempered series (same options as `simulate`).
    Tempered(RunArgs),
}

/// Options shared by the config-driven commands; each flag overrides the config field.
#[derive(Args, Debug, Default)]
pub struct RunArgs {
    /// JSON run configuration.
    #[arg(short, long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = parse_serde::<Variant>)]
    pub variant: Option<Variant>,
    /// Alpha model, as JSON or `constant:v`, `cosine:c0,c1`, `rational:c0,c1,c2`, `expr:SRC;a;b;m`.
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub t0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a0: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Lower cutoff on |y|.
    #[arg(short = 'K', long = "K")]
    pub k: Option<f64>,
    /// Upper cutoff on |y|.
    #[arg(short = 'N', long = "N")]
    pub n: Option<f64>,
    #[arg(long, value_parser = parse_serde::<PlanFormula>)]
    pub formula: Option<PlanFormula>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub grid_len: Option<usize>,
    #[arg(long)]
    pub paths: Option<usize>,
    /// Series length for the tempered variant.
    #[arg(long)]
    pub n_terms: Option<usize>,
    /// Jump weight: `unit`, `stable_norm` or `constant:c`.
    #[arg(long)]
    pub weight: Option<String>,
    /// Starting values for `localize` (comma separated).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub z0: Option<Vec<f64>>,
    /// Scales for `localize` (comma separated).
    #[arg(long = "r", value_delimiter = ',')]
    pub r_values: Option<Vec<f64>>,
    #[arg(long)]
    pub n_paths: Option<usize>,
    /// Output file stem.
    #[arg(long)]
    pub stem: Option<String>,
}

#[derive(Args, Debug)]
pub struct PlanArgs {
    #[arg(long)]
    pub epsilon: f64,
    /// Time horizon T.
    #[arg(short = 'T', long = "T", default_value_t = 1.0)]
    pub horizon: f64,
    #[arg(long)]
    pub alpha: String,
    /// Lower cutoff; when unset K = 1 and the small-jump cutoff is reported as well.
    #[arg(short = 'K', long = "K")]
    pub k: Option<f64>,
    #[arg(long, value_parser = parse_serde::<PlanFormula>, default_value = "log_k")]
    pub formula: PlanFormula,
    /// Also report M and N with the derivative ratio taken over `lo,hi` only (not a certified bound).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub z_range: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Point set CSV (`x,y` header).
    #[arg(long)]
    pub points: PathBuf,
    #[arg(long)]
    pub alpha: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a0: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub t0: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub t1: f64,
    /// Drop points with |y| >= N before solving.
    #[arg(short = 'N', long = "N")]
    pub n: Option<f64>,
    #[arg(long, value_enum, default_value = "sequential")]
    pub method: Method,
    #[arg(long, default_value_t = 1e-13)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    /// Output CSV; a `.meta.json` sidecar is written next to it.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Sequential,
    Picard,
}

#[derive(Subcommand, Debug)]
pub enum PointsCommand {
    /// Sample the Poisson strip `(t0,t1) x ((-N,-K] ∪ [K,N))`.
    Gen {
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t0: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        t1: f64,
        #[arg(short = 'K', long = "K")]
        k: f64,
        #[arg(short = 'N', long = "N")]
        n: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; `.json` selects JSON, anything else CSV.
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Convert between CSV and JSON point files (format from the extensions).
    Convert {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t0: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        t1: f64,
    },
}

fn parse_serde<T: serde::de::DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let out_dir = cli.out_dir.as_deref();
    let result = match cli.command {
        Command::Simulate(args) => commands::simulate(&args, out_dir, None),
        Command::Tempered(args) => commands::simulate(&args, out_dir, Some(Variant::Tempered)),
        Command::Plan(args) => commands::plan(&args),
        Command::Solve(args) => commands::solve(&args, out_dir),
        Command::Points(cmd) => commands::points(&cmd),
        Command::Localize(args) => commands::localize(&args, out_dir),
        Command::Holder(args) => commands::holder(&args, out_dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
