//! `qmetric`: certificates, verification sweeps, and state distances for
//! trace-induced quantum metrics on full matrix algebras.
//!
//! Exit codes: 0 all checks pass, 1 a mathematical check failed, 2 usage or
//! validation error.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use report::{render_csv, render_json, render_text, CommandOutput};

#[derive(Parser)]
#[command(
    name = "qmetric",
    version,
    about = "Trace-induced quantum metrics on full matrix algebras: non-isometry certificates, invariant sweeps, and state distances"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputArgs {
    /// Emit the report as a single JSON document.
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    /// Emit per-trial rows as CSV (suite,n,k,trial,residual,tolerance,pass).
    #[arg(long)]
    csv: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate both seminorms on the witness and certify the gap.
    Certify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: Option<usize>,
        /// Certify every proper nontrivial divisor of n.
        #[arg(long = "all-k")]
        all_k: bool,
        #[arg(long, env = "QMETRIC_SEED", default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a named invariant sweep with seeded trials.
    Verify {
        /// One of: cstar, embed, trace, projection, leibniz, unitary, kernel.
        #[arg(long)]
        suite: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, env = "QMETRIC_SEED", default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Distance between two states under a seminorm, as a certified lower
    /// bound with an exact oracle on commuting instances.
    Mk {
        /// 'trace' or 'k'.
        #[arg(long, default_value = "trace")]
        variant: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: Option<usize>,
        /// First state, in the shared matrix JSON format.
        #[arg(long)]
        rho: PathBuf,
        /// Second state.
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long = "max-iters", default_value_t = 2000)]
        max_iters: usize,
        /// Oracle-agreement tolerance for the converged flag.
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        /// Write the maximizing certificate matrix here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = "QMETRIC_SEED", default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Embed a k x k matrix as n/k diagonal blocks of an n x n matrix.
    Embed {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, env = "QMETRIC_SEED", default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        format: OutputArgs,
    },
    /// Apply the trace-preserving conditional expectation onto the embedded
    /// subalgebra.
    Project {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, env = "QMETRIC_SEED", default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        format: OutputArgs,
    },
    /// Evaluate a seminorm on a self-adjoint matrix file.
    Lipnorm {
        /// 'trace' or 'k'.
        #[arg(long, default_value = "trace")]
        variant: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, env = "QMETRIC_SEED", default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (outcome, output_args) = match &cli.command {
        Command::Certify {
            n,
            k,
            all_k,
            seed,
            output,
        } => (commands::cmd_certify(*n, *k, *all_k, *seed), output),
        Command::Verify {
            suite,
            n,
            k,
            trials,
            seed,
            output,
        } => (commands::cmd_verify(suite, *n, *k, *trials, *seed), output),
        Command::Mk {
            variant,
            n,
            k,
            rho,
            sigma,
            max_iters,
            tol,
            out,
            seed,
            output,
        } => (
            commands::cmd_mk(
                variant,
                *n,
                *k,
                rho,
                sigma,
                *max_iters,
                *tol,
                out.as_ref(),
                *seed,
            ),
            output,
        ),
        Command::Embed {
            k,
            n,
            input,
            output,
            seed,
            format,
        } => (commands::cmd_embed(*k, *n, input, output, *seed), format),
        Command::Project {
            n,
            k,
            input,
            output,
            seed,
            format,
        } => (commands::cmd_project(*n, *k, input, output, *seed), format),
        Command::Lipnorm {
            variant,
            n,
            k,
            input,
            seed,
            output,
        } => (commands::cmd_lipnorm(variant, *n, *k, input, *seed), output),
    };

    match outcome {
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
        Ok(CommandOutput { report, rows }) => {
            if output_args.json {
                println!("{}", render_json(&report));
            } else if output_args.csv {
                print!("{}", render_csv(&rows));
            } else {
                print!("{}", render_text(&report));
            }
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
