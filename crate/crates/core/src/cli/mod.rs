//! Command-line front end: JSON inputs in, JSON reports out.
//!
//! Exit codes: 0 success, 1 computational failure, 2 parse error,
//! 3 validation error. [`run`] is the whole program minus process I/O.

mod commands;

use std::path::PathBuf;

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

pub const MAX_TRUNC: usize = 64;
pub const SAMPLES_RANGE: (usize, usize) = (64, 65536);

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid {field}: {message}")]
    Validation { field: String, message: String },
    #[error("{0}")]
    Compute(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Compute(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Validation { .. } => 3,
        }
    }

    pub(crate) fn invalid(field: &str, message: impl ToString) -> Self {
        CliError::Validation {
            field: field.to_string(),
            message: message.to_string(),
        }
    }

    pub(crate) fn compute(e: impl std::fmt::Display) -> Self {
        CliError::Compute(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "polycanon", version, about = "Polynomial canonical forms of analytic germs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Flags {
    /// Truncation order N (at most 64).
    #[arg(long, global = true)]
    pub trunc: Option<usize>,
    /// Working radius r.
    #[arg(long, global = true)]
    pub radius: Option<f64>,
    /// Outer radius R of the disk of analyticity.
    #[arg(long, global = true)]
    pub outer: Option<f64>,
    /// Circle samples M (64..=65536).
    #[arg(long, global = true, default_value_t = 1024)]
    pub samples: usize,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Compact JSON only, no summary on stderr.
    #[arg(long, global = true, conflicts_with = "pretty")]
    pub json: bool,
    /// Indented JSON.
    #[arg(long, global = true)]
    pub pretty: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    Graded,
    Newton,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyArg {
    Affine,
    Collision,
    Critical,
    Composite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorKind {
    Geometric,
    Exponential,
    Binomial,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weierstrass preparation of a series in d >= 2 variables.
    Weierstrass { input: PathBuf },
    /// Levinson representation U = Σ v_j x^j.
    #[command(alias = "levinson")]
    LevinsonDecompose {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "graded")]
        solver: Solver,
    },
    /// Check a stored representation against a fresh decomposition.
    LevinsonVerify { input: PathBuf },
    /// Residual of Π(z - z_i) = Π(y(z) - y(z_i)) on |z| = r.
    FeResidual { input: PathBuf },
    /// Gap inequality near the identity; random when no input is given.
    FeGap {
        input: Option<PathBuf>,
        /// Number of roots of a random configuration.
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// ‖f‖_r as a fraction of delta for a random perturbation.
        #[arg(long, default_value_t = 0.5)]
        scale: f64,
    },
    /// Local condition versus root containment for P = Q(y).
    FeCheckA {
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "collision")]
        family: FamilyArg,
    },
    /// α, β, 𝓛 f and 𝓣 f for a root configuration.
    FeOperators { input: PathBuf },
    /// Exact coefficient of Π f_i^{n_i}.
    MpExact { input: PathBuf },
    /// Saddle-point estimate of the coefficient.
    MpEstimate { input: PathBuf },
    /// Critical points over a grid of t0.
    MpSweep {
        input: PathBuf,
        #[arg(long, default_value_t = 12)]
        steps: usize,
        #[arg(long, default_value_t = 0.2)]
        lo: f64,
        #[arg(long, default_value_t = 0.8)]
        hi: f64,
    },
    /// Emit a one-factor system for mp-* commands.
    GenFactor {
        #[arg(long, value_enum)]
        kind: FactorKind,
        /// Exponent m of (1 + z)^m.
        #[arg(long, default_value_t = 1)]
        power: u32,
        /// Rate a of e^{a z}.
        #[arg(long, default_value_t = 1.0)]
        rate: f64,
        /// Exponent n_1 of the factor.
        #[arg(long, default_value_t = 1)]
        weight: u64,
        /// Target power n_0; defaults to the truncation order.
        #[arg(long)]
        n0: Option<u64>,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Accepts `fe residual` as well as `fe-residual`, and likewise for `mp` and `levinson`.
fn join_group(mut args: Vec<String>) -> Vec<String> {
    let pos = args.iter().position(|a| !a.starts_with('-'));
    if let Some(i) = pos {
        if matches!(args[i].as_str(), "fe" | "mp" | "levinson") && i + 1 < args.len() {
            let joined = format!("{}-{}", args[i], args[i + 1]);
            if Cli::command().find_subcommand(&joined).is_some() {
                args.splice(i..i + 2, [joined]);
            }
        }
    }
    args
}

/// Runs one command line (without the program name).
pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args = join_group(args.into_iter().map(Into::into).collect());
    let cli = match Cli::try_parse_from(std::iter::once("polycanon".to_string()).chain(args)) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    match commands::dispatch(&cli) {
        Ok((value, summary)) => {
            let body = if cli.flags.pretty {
                serde_json::to_string_pretty(&value)
            } else {
                serde_json::to_string(&value)
            }
            .expect("reports serialize");
            Outcome {
                code: 0,
                stdout: body + "\n",
                stderr: if cli.flags.json { String::new() } else { summary + "\n" },
            }
        }
        Err(e) => Outcome {
            code: e.code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}
