//! Command-line front end for `perturbreg`: stable differentiation of
//! sampled data, regularized matrix solves, reproducible experiments and
//! stabilization sweeps.
//!
//! Exit codes: 0 success, 1 I/O or other runtime failure, 2 bad flags or
//! malformed input, 3 non-uniform sample grid, 4 warning escalated by
//! `--strict`, 5 singular system.

// `!(x > 0.0)` style checks are deliberate: NaN must fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod failure;
pub mod output;
pub mod problem;
pub mod samples;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use perturbreg::experiment::{DEFAULT_GRID_POINTS, DEFAULT_SEED};
use perturbreg::{CoordinationRule, Execution};

use commands::{BaselineArg, DifferentiateArgs, ExperimentArgs};

#[derive(Parser)]
#[command(name = "perturbreg", version, about = "Perturbation-method regularization and stable differentiation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Differentiate uniformly sampled noisy data from a `t,y` CSV.
    Differentiate {
        input: PathBuf,
        /// Noise level of the samples.
        #[arg(long)]
        delta: Option<f64>,
        /// Regularization parameter; overrides --rule.
        #[arg(long, conflicts_with = "rule")]
        alpha: Option<f64>,
        /// How α follows δ: sqrt, power:<p> or fixed:<alpha>.
        #[arg(long, default_value = "sqrt", value_parser = parse_rule)]
        rule: CoordinationRule,
        /// `auto`, or the value and slope `c,d` of the data at the left end.
        #[arg(long, default_value = "auto")]
        baseline: BaselineArg,
        /// Width of the fit window used by --baseline auto.
        #[arg(long)]
        window: Option<f64>,
        /// Output CSV (`t,dy,x_alpha`); standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Fail when α is smaller than the grid step.
        #[arg(long)]
        strict: bool,
    },
    /// Solve the regularized system described by a JSON problem file.
    Solve {
        problem: PathBuf,
        /// Report JSON; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the seeded noisy-differentiation experiments.
    Experiment {
        /// Example id (1 or 2).
        #[arg(long)]
        example: u32,
        /// Comma-separated noise levels.
        #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "0.1,0.01,0.001")]
        deltas: Vec<f64>,
        /// Number of seeds per noise level.
        #[arg(long, default_value_t = 1)]
        seeds: usize,
        /// First seed; later runs use seed+1, seed+2, ...
        #[arg(long, env = "PERTURBREG_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Grid points.
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
        n: usize,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Run on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Stabilization gap and resolvent estimate over a list of α values.
    Sweep {
        problem: PathBuf,
        /// Comma-separated α values.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_alpha)]
        alphas: Vec<f64>,
        /// Output CSV (`alpha,S,c_alpha_est,q_est`); standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run on one thread.
        #[arg(long)]
        sequential: bool,
    },
}

fn parse_rule(s: &str) -> Result<CoordinationRule, String> {
    s.parse().map_err(|e: perturbreg::Error| e.to_string())
}

fn parse_alpha(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(a) if a > 0.0 && a.is_finite() => Ok(a),
        _ => Err(format!("'{s}' is not a positive number")),
    }
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

/// Parses `args` (program name first) and runs the command; returns the exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    let result = match cli.command {
        Command::Differentiate { input, delta, alpha, rule, baseline, window, out, strict } => {
            commands::differentiate(DifferentiateArgs { input, delta, alpha, rule, baseline, window, out, strict })
        }
        Command::Solve { problem, out } => commands::solve(&problem, out.as_deref()),
        Command::Experiment { example, deltas, seeds, seed, n, out, sequential } => {
            commands::experiment(ExperimentArgs { example, deltas, seeds, seed, n, out, exec: execution(sequential) })
        }
        Command::Sweep { problem, alphas, out, sequential } => {
            commands::sweep(&problem, &alphas, out.as_deref(), execution(sequential))
        }
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {f}");
            f.exit_code()
        }
    }
}
