//! Batch experiment runner: each subcommand evaluates one experiment
//! deterministically (same config + seed → byte-identical CSV/JSON) and
//! drops a manifest alongside the artifacts.
//!
//! Exit codes: 0 success, 2 config error, 3 numerical failure.

mod experiments;

use clap::{Args, Parser, Subcommand};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "quasibasis", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Rotation number: "quad:p,q,d,r" or a decimal literal
    #[arg(long)]
    alpha: String,
    /// Force float (double-double) orbit arithmetic even for quad alphas
    #[arg(long, conflicts_with = "exact")]
    float: bool,
    /// Require exact arithmetic (reject decimal alphas)
    #[arg(long)]
    exact: bool,
    /// RNG seed for randomized checks
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for artifacts
    #[arg(long)]
    out: std::path::PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Discrepancy trajectory, BMO statistics and the membership verdict
    Dichotomy {
        #[command(flatten)]
        common: CommonArgs,
        /// Single interval `I:left,length[,closure]`
        #[arg(long, conflicts_with = "set")]
        interval: Option<String>,
        /// Multiband set "I:..." or "C:(c)left,length+..."
        #[arg(long)]
        set: Option<String>,
        /// Window sizes, comma-separated (e.g. "4096,1048576")
        #[arg(long, default_value = "4096,1048576")]
        n: String,
        /// Membership search tolerance
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Finite-section Riesz-bound trend for E(Λ_α(I)) on S
    Gram {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        interval: String,
        /// Analysis set; defaults to the interval itself
        #[arg(long)]
        set: Option<String>,
        #[arg(long, default_value = "32,64,128,256")]
        sizes: String,
        /// Also dump the largest Gram section in the binary layout
        #[arg(long)]
        dump_gram: bool,
    },
    /// Primal and dual Riesz-bound trends (Meyer duality experiment)
    Duality {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        interval: String,
        #[arg(long)]
        set: Option<String>,
        #[arg(long, default_value = "32,64,128,256")]
        sizes: String,
    },
    /// Variance of ergodic sums: direct, kernel and limit forms
    Variance {
        #[command(flatten)]
        common: CommonArgs,
        /// Polynomial as a JSON file {"k": [re, im], ...}
        #[arg(long, conflicts_with = "random_degree")]
        poly: Option<std::path::PathBuf>,
        /// Random mean-zero polynomial of this degree (uses --seed)
        #[arg(long)]
        random_degree: Option<i64>,
        #[arg(long, default_value = "10,100,1000")]
        n: String,
    },
    /// Sawtooth transfer function: cocycle check, deltas, quarter condition
    Coboundary {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        set: String,
        /// Slice window "lo,hi" for the delta enumeration
        #[arg(long, default_value = "0,10000")]
        window: String,
        /// Choose the constant so that ∫_S g = 0
        #[arg(long, default_value_t = true)]
        normalize: bool,
        /// Random points for the cocycle residual check
        #[arg(long, default_value_t = 10000)]
        grid: usize,
    },
    /// BMO diagnostic of the counting deviation n_Λ(x) − a·x
    Pavlov {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, conflicts_with = "set")]
        interval: Option<String>,
        #[arg(long)]
        set: Option<String>,
        /// Sampling density a ∈ (0,1]; defaults to mes S
        #[arg(long)]
        a: Option<f64>,
        #[arg(long, default_value = "0,65536")]
        window: String,
        /// Window family: dyadic or exhaustive
        #[arg(long, default_value = "dyadic")]
        family: String,
    },
    /// Aggregate an artifact directory into one summary JSON on stdout
    Report {
        /// Directory produced by an experiment run
        dir: std::path::PathBuf,
    },
}

pub enum CliError {
    Config(String),
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numerical(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Dichotomy {
            common,
            interval,
            set,
            n,
            tol,
        } => experiments::run_dichotomy(&common, interval.as_deref(), set.as_deref(), &n, tol),
        Command::Gram {
            common,
            interval,
            set,
            sizes,
            dump_gram,
        } => experiments::run_gram(&common, &interval, set.as_deref(), &sizes, dump_gram),
        Command::Duality {
            common,
            interval,
            set,
            sizes,
        } => experiments::run_duality(&common, &interval, set.as_deref(), &sizes),
        Command::Variance {
            common,
            poly,
            random_degree,
            n,
        } => experiments::run_variance(&common, poly.as_deref(), random_degree, &n),
        Command::Coboundary {
            common,
            set,
            window,
            normalize,
            grid,
        } => experiments::run_coboundary(&common, &set, &window, normalize, grid),
        Command::Pavlov {
            common,
            interval,
            set,
            a,
            window,
            family,
        } => experiments::run_pavlov(
            &common,
            interval.as_deref(),
            set.as_deref(),
            a,
            &window,
            &family,
        ),
        Command::Report { dir } => experiments::emit_report(&dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
