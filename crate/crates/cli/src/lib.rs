//! `gasbound`: analyticity thresholds and brute-force checks from the
//! command line.
//!
//! Machine-readable output goes to standard output, a short human log to
//! standard error. Exit codes: `0` success, `1` computational failure, `2` a
//! verification check above tolerance, `64` usage or configuration error.

mod commands;
mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gasbound_core::{Convention, Error};
use serde::Serialize;

pub use output::{config_hash, Envelope, TOOL, VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Caps the rayon worker count; unset means hardware parallelism.
pub const THREADS_ENV: &str = "GASBOUND_THREADS";

#[derive(Debug, Parser)]
#[command(name = "gasbound", version, about = "Analyticity thresholds for locally stable hard-core gases")]
pub struct Cli {
    /// Write the result here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Temperedness constants C_φ, A_φ, P_φ and Ĉ_φ.
    Constants(ConstantsArgs),
    /// Threshold e^{−βC}λ̃ next to the Penrose–Ruelle and Procacci–Yuhjtman bounds.
    Threshold(ThresholdArgs),
    /// Potential-weighted walk integral V_k.
    Vk(VkArgs),
    /// Upper bound Δ̂_φ on the connective constant.
    Delta(DeltaArgs),
    /// Brute-force checks on a one-dimensional window.
    Verify(VerifyArgs),
    /// Threshold over a grid of inverse temperatures.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PotentialArgs {
    /// `key = value` potential description.
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub potential: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ConstantsArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub potential: PotentialArgs,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Relative tolerance of the radial integrals.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct McArgs {
    /// Monte Carlo sample count; scientific notation is accepted.
    #[arg(long, default_value = "1e6", value_parser = parse_count)]
    pub samples: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value = "trailing")]
    pub convention: Convention,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ThresholdArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub potential: PotentialArgs,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// `auto` (Monte Carlo Δ̂ up to --kmax), `cphi`, or a number.
    #[arg(long, default_value = "cphi")]
    pub delta: DeltaChoice,
    #[arg(long, default_value_t = 3)]
    pub kmax: usize,
    #[command(flatten)]
    pub mc: McArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mc,
    /// Nested adaptive quadrature; one dimension and k ≤ 3 only.
    Quadrature,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VkArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub potential: PotentialArgs,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "mc")]
    pub method: Method,
    #[command(flatten)]
    pub mc: McArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DeltaArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub potential: PotentialArgs,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 3)]
    pub kmax: usize,
    #[command(flatten)]
    pub mc: McArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Logz,
    Recursion,
    Correspondence,
    Selfmap,
    Contraction,
    Zerofree,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub potential: PotentialArgs,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Constant activity, real or complex (`0.1+0.05i`).
    #[arg(long, default_value = "0.1", value_parser = parse_complex, allow_hyphen_values = true)]
    #[serde(serialize_with = "output::complex")]
    pub lambda: num_complex::Complex64,
    /// Length of the window `[0, L]`.
    #[arg(long, default_value_t = 1.5)]
    pub volume: f64,
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "logz,recursion,correspondence,selfmap,contraction,zerofree"
    )]
    pub checks: Vec<Check>,
    /// Random boundary conditions for `selfmap`, pairs for `contraction`.
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub potential: PotentialArgs,
    #[arg(long)]
    pub beta_min: f64,
    #[arg(long)]
    pub beta_max: f64,
    #[arg(long)]
    pub steps: usize,
    #[arg(long, default_value = "cphi")]
    pub delta: DeltaChoice,
    #[arg(long, default_value_t = 3)]
    pub kmax: usize,
    #[command(flatten)]
    pub mc: McArgs,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DeltaChoice {
    Auto,
    Cphi,
    Value(f64),
}

impl std::str::FromStr for DeltaChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Self::Auto),
            "cphi" | "c_phi" => Ok(Self::Cphi),
            v => v.parse().map(Self::Value).map_err(|_| format!("expected `auto`, `cphi` or a number, got `{v}`")),
        }
    }
}

fn parse_count(s: &str) -> Result<u64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !(v >= 1.0 && v.fract() == 0.0 && v <= u64::MAX as f64) {
        return Err(format!("`{s}` is not a positive integer"));
    }
    Ok(v as u64)
}

/// `a`, `bi`, `a+bi` or `a-bi`.
pub fn parse_complex(s: &str) -> Result<num_complex::Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("`{s}` is not a real or complex number");
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return t.parse().map(|re| num_complex::Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // Split at the last sign that is not part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        v => v,
    };
    Ok(num_complex::Complex64::new(re.parse().map_err(|_| bad())?, im.trim_start_matches('+').parse().map_err(|_| bad())?))
}

/// Errors classified by exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Io(_) => Failure::Usage(e.to_string()),
            other => Failure::Compute(other),
        }
    }
}

fn thread_count() -> Result<Option<usize>, Failure> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Failure::Usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit code.
pub fn run_with_io<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = write!(out, "{}", e.render());
                    return if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand { EXIT_USAGE } else { EXIT_OK };
                }
                _ => EXIT_USAGE,
            };
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    let result = thread_count().and_then(|threads| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            builder = builder.num_threads(n);
        }
        let pool = builder.build().map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
        // The human log is buffered so the command body can run on the pool.
        let mut log = Vec::new();
        let r = pool.install(|| commands::execute(&cli.command, &mut log));
        let _ = err.write_all(&log);
        r
    });
    match result {
        Ok(outcome) => {
            let written = match &cli.output {
                Some(path) => std::fs::write(path, &outcome.text).map_err(|e| format!("{}: {e}", path.display())),
                None => out.write_all(outcome.text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                let _ = writeln!(err, "error: cannot write output: {e}");
                return EXIT_FAILURE;
            }
            outcome.code
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Compute(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAILURE
        }
    }
}
