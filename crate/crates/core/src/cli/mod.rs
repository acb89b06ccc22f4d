//! Command-line front end.
//!
//! [`run`] parses arguments, sizes the thread pool from `WIDTHLAB_THREADS`, routes to
//! [`dispatch`] and turns library errors into a JSON object on stderr plus an exit status
//! taken from [`Error::exit_status`].

mod dispatch;
mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::exponents::{Case8Theta4, LpExponent, DEFAULT_TIE_TOLERANCE};

pub use dispatch::dispatch;
pub use output::{error_json, format_sig, read_pairs, SIG_DIGITS};

/// Version of the JSON and CSV layouts; printed by `--version`.
pub const SCHEMA_VERSION: &str = "1";

pub const THREADS_ENV: &str = "WIDTHLAB_THREADS";

#[derive(Debug, Clone, Parser)]
#[command(name = "widthlab", version = SCHEMA_VERSION, about = "Width exponents and desk-scale checks for weighted Sobolev classes")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Predicted exponent, regime and hypothesis report for a problem.
    Exponent(ExponentArgs),
    /// Hypothesis report only.
    Check(ProblemArgs),
    /// Width of a finite-dimensional ball or two-ball intersection.
    BallWidth(BallWidthArgs),
    /// Error sweep of the multi-scale scheme over a bump ensemble.
    Simulate(SimulateArgs),
    /// Lower-bound curve over a list of budgets.
    LowerBound(LowerBoundArgs),
    /// Log-log rate fit of a CSV column against `n`.
    Fit(FitArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    /// Problem JSON file.
    #[arg(long)]
    pub problem: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Case8Arg {
    QScaled,
    AsPrinted,
}

impl From<Case8Arg> for Case8Theta4 {
    fn from(c: Case8Arg) -> Self {
        match c {
            Case8Arg::QScaled => Case8Theta4::QScaled,
            Case8Arg::AsPrinted => Case8Theta4::AsPrinted,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ExponentArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, value_enum, default_value_t = Case8Arg::QScaled)]
    pub case8: Case8Arg,
    /// Two exponents closer than this count as tied.
    #[arg(long, default_value_t = DEFAULT_TIE_TOLERANCE)]
    pub tie_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WidthMethod {
    Exact,
    Gluskin,
    Upper,
    Numeric,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

fn parse_lp(s: &str) -> std::result::Result<LpExponent, String> {
    if s.eq_ignore_ascii_case("inf") {
        return Ok(LpExponent::INFINITY);
    }
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is neither a number nor `inf`"))?;
    LpExponent::new(v).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct BallWidthArgs {
    /// Ambient dimension.
    #[arg(long = "N")]
    pub dim: usize,
    /// Subspace dimension.
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_parser = parse_lp)]
    pub p: LpExponent,
    #[arg(long, value_parser = parse_lp)]
    pub q: LpExponent,
    #[arg(long, value_enum, default_value_t = WidthMethod::Exact)]
    pub method: WidthMethod,
    /// Radius of the `l_p` ball.
    #[arg(long, default_value_t = 1.0)]
    pub k0: f64,
    /// Second ball `k1·B_{p1}`; given together with `--k1` the body is the intersection.
    #[arg(long, value_parser = parse_lp, requires = "k1")]
    pub p1: Option<LpExponent>,
    #[arg(long, requires = "p1")]
    pub k1: Option<f64>,
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
    /// Random restarts of the subspace search.
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub problem: PathBuf,
    /// Strictly increasing, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub budgets: Vec<usize>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
    /// Ensemble JSON; a bump grid sized from the problem when absent.
    #[arg(long)]
    pub ensemble: Option<PathBuf>,
    /// Rings resolved by the domain; sized from the largest budget when absent.
    #[arg(long)]
    pub t_max: Option<u32>,
    #[arg(long)]
    pub t_star: Option<f64>,
    #[arg(long)]
    pub t_star2: Option<f64>,
    #[arg(long)]
    pub m_one: Option<f64>,
    #[arg(long, default_value_t = 10)]
    pub max_extra_depth: u32,
    /// Gauss nodes per cell.
    #[arg(long, default_value_t = 16)]
    pub nodes: usize,
    #[arg(long, default_value_t = 48)]
    pub grading_depth: u32,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct LowerBoundArgs {
    #[arg(long)]
    pub problem: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    pub budgets: Vec<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    /// CSV with an `n` column.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value = "error")]
    pub column: String,
    /// Fraction of the smallest budgets left out.
    #[arg(long, default_value_t = 0.25, conflicts_with_all = ["n_min", "n_max", "all"])]
    pub drop_fraction: f64,
    #[arg(long)]
    pub n_min: Option<f64>,
    #[arg(long)]
    pub n_max: Option<f64>,
    /// Fit every row.
    #[arg(long, conflicts_with_all = ["n_min", "n_max"])]
    pub all: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::Input(format!("{THREADS_ENV} = `{raw}` is not a positive integer")))?;
    // the global pool can only be set once per process; later calls keep the first size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

/// Full command-line entry point; returns the process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let err = Error::Input(e.render().to_string().trim().to_string());
            let _ = writeln!(stderr, "{}", error_json(&err));
            return err.exit_status();
        }
    };
    match configure_threads().and_then(|()| dispatch(&cfg, stdout)) {
        Ok(()) => 0,
        Err(err) => {
            let _ = writeln!(stderr, "{}", error_json(&err));
            err.exit_status()
        }
    }
}
