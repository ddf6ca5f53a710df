//! Command-line front end for `wot1d`.
//!
//! Every subcommand prints either CSV (the default) or JSON, to stdout or to
//! the file named by `--out`. Validation failures exit with status 2 and a
//! one-line diagnostic on stderr; I/O failures exit with status 1.

mod commands;
mod input;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use input::builtin_measure;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Invalid(#[from] wot1d::Error),
    #[error("unknown builtin measure {0:?} (expected uniform, dirac:<x>, two-atoms:<x1>,<x2> or density2-left)")]
    UnknownBuiltin(String),
    #[error("invalid JSON in {origin}: {message}")]
    Json { origin: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            _ => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Comma-separated reals, parsed as one value so that later occurrences
/// replace earlier ones.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatList(pub Vec<f64>);

fn parse_list(s: &str) -> Result<FloatList, String> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()
        .map(FloatList)
}

#[derive(Debug, Parser)]
#[command(
    name = "wot1d",
    version,
    about = "Optimal transport experiments on the unit interval"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for every random draw.
    #[arg(long, env = "WOT1D_SEED", default_value_t = 0, global = true)]
    pub seed: u64,
    /// Worker threads for Monte-Carlo estimates.
    #[arg(long, default_value_t = 1, global = true)]
    pub jobs: usize,
    /// JSON object of flag values; its entries override the command line.
    #[arg(long, global = true)]
    pub config: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// 2-Wasserstein distance between two measures.
    #[command(args_override_self = true)]
    Dist {
        #[arg(long)]
        mu: String,
        #[arg(long)]
        nu: String,
        /// Also solve the transport LP (atomic measures only).
        #[arg(long)]
        lp: bool,
    },
    /// Optimal transport plan.
    #[command(args_override_self = true)]
    Plan {
        #[arg(long)]
        mu: String,
        #[arg(long)]
        nu: String,
    },
    /// Points on the geodesic from `mu` to `nu`.
    #[command(args_override_self = true)]
    Geodesic {
        #[arg(long)]
        mu: String,
        #[arg(long)]
        nu: String,
        /// Interpolation times.
        #[arg(long, value_parser = parse_list, default_value = "0.5")]
        t: FloatList,
    },
    /// Entropy along the geodesic and its K = 0 convexity deficiency.
    #[command(name = "entropy-scan", args_override_self = true)]
    EntropyScan {
        #[arg(long)]
        mu0: String,
        #[arg(long)]
        mu1: String,
        #[arg(long, value_parser = parse_list, default_value = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1")]
        grid: FloatList,
    },
    /// Deviation from the flat comparison-triangle identity.
    #[command(name = "alexandrov-check", args_override_self = true)]
    AlexandrovCheck {
        #[arg(long)]
        mu: String,
        #[arg(long)]
        nu: String,
        #[arg(long)]
        eta: String,
        #[arg(long, value_parser = parse_list, default_value = "0.25,0.5,0.75")]
        t: FloatList,
    },
    /// Certifies the step-function embedding on dyadic partitions.
    #[command(name = "gh-certify", args_override_self = true)]
    GhCertify {
        /// Partition levels to certify.
        #[arg(long, value_parser = parse_list, default_value = "1,2,3,4,5,6,7,8")]
        levels: FloatList,
        /// JSON array of quantile functions; drawn from the entropic measure if absent.
        #[arg(long)]
        quantiles: Option<String>,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// Level of the partition the random samples are drawn on.
        #[arg(long, default_value_t = 10)]
        sample_level: u32,
    },
    /// Draws step quantiles from the entropic measure.
    #[command(args_override_self = true)]
    Sample {
        #[arg(long)]
        level: u32,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Exact `P(g(s) > level)` against a Monte-Carlo estimate.
    #[command(name = "beta-check", args_override_self = true)]
    BetaCheck {
        #[arg(long)]
        s: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 0.5)]
        level: f64,
        #[arg(long, default_value_t = 100_000)]
        draws: u64,
    },
    /// Scans the log-concavity ratio against the threshold for a Ricci bound K.
    #[command(name = "ricci-falsify", args_override_self = true)]
    RicciFalsify {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        t: f64,
        #[arg(long = "K", allow_negative_numbers = true)]
        k: f64,
        /// Defaults to 1e-1, 1e-2, ..., 1e-14.
        #[arg(long, value_parser = parse_list)]
        s_grid: Option<FloatList>,
    },
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit status.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let mut args: Vec<String> = args.into_iter().map(Into::into).collect();
    if let Some(path) = input::find_config(&args) {
        match input::config_flags(&path) {
            Ok(extra) => args.extend(extra),
            Err(e) => return fail(e, stderr),
        }
    }
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let rendered = match commands::dispatch(&cli) {
        Ok(text) => text,
        Err(e) => return fail(e, stderr),
    };
    let written = match &cli.global.out {
        Some(path) => std::fs::write(path, &rendered).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            source: e,
        }),
        None => stdout
            .write_all(rendered.as_bytes())
            .map_err(|e| CliError::Io {
                path: "<stdout>".into(),
                source: e,
            }),
    };
    match written {
        Ok(()) => 0,
        Err(e) => fail(e, stderr),
    }
}

fn fail(e: CliError, stderr: &mut dyn Write) -> i32 {
    let _ = writeln!(stderr, "error: {e}");
    e.exit_code()
}
