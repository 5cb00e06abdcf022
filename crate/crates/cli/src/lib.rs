//! Command-line front end for `warpath`.
//!
//! [`run`] parses arguments, dispatches to a subcommand and maps the outcome
//! to an exit code: 0 on success, 1 on usage errors, 2 on runtime errors.

mod commands;
pub mod io;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Exit code for successful runs.
pub const EXIT_OK: i32 = 0;
/// Exit code for invalid command lines.
pub const EXIT_USAGE: i32 = 1;
/// Exit code for failures after a valid command line was parsed.
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<warpath::Error> for CliError {
    fn from(e: warpath::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "warpath",
    version,
    about = "Warping-path tools for dynamic time warping"
)]
pub struct Cli {
    /// Write the main output here instead of standard output.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "subcommand")]
pub enum Command {
    /// DTW distance and optimal warping paths of two series.
    Dtw(DtwArgs),
    /// Table of warping-path counts for every lattice up to the given size.
    Delannoy(DelannoyArgs),
    /// List the warping paths of an m x n lattice.
    Enumerate(EnumerateArgs),
    /// Embedding-derived matrices of one warping path.
    Algebra(AlgebraArgs),
    /// Monte Carlo estimate of how often the optimal path is unique.
    Uniqueness(UniquenessArgs),
    /// Scan a 2-D slice of series space for cost ties between path pairs.
    Zeroset(ZerosetArgs),
    /// Average a sample of series by stochastic subgradient descent.
    Average(AverageArgs),
    /// Train an LVQ1 classifier in DTW space.
    Lvq(LvqArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct ToleranceArgs {
    /// Relative tolerance under which two costs count as tied.
    #[arg(long, default_value_t = 1e-9)]
    pub tie_eps: f64,
    /// Compare costs exactly (integer-valued inputs only).
    #[arg(long)]
    pub exact: bool,
}

impl ToleranceArgs {
    fn tolerance(&self) -> warpath::Tolerance {
        warpath::Tolerance {
            tie_epsilon: self.tie_eps,
            exact_mode: self.exact,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct DtwArgs {
    /// First series (CSV, or JSON holding one series).
    pub x: PathBuf,
    /// Second series.
    pub y: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub tolerance: ToleranceArgs,
    /// Also list every optimal path.
    #[arg(long)]
    pub all_paths: bool,
    /// Maximum number of optimal paths to list.
    #[arg(long, default_value_t = warpath::dtw::DEFAULT_PATH_CAP)]
    pub cap: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct DelannoyArgs {
    #[arg(long, default_value_t = 10)]
    pub max_m: usize,
    #[arg(long, default_value_t = 9)]
    pub max_n: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct EnumerateArgs {
    pub m: usize,
    pub n: usize,
    /// Print at most this many paths.
    #[arg(long)]
    pub limit: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct AlgebraArgs {
    pub m: usize,
    pub n: usize,
    /// The path as a JSON list of 1-based [i, j] pairs.
    #[arg(long)]
    pub path: String,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistArg {
    Normal,
    Uniform,
    Quantized,
}

#[derive(Debug, Args, Serialize)]
pub struct UniquenessArgs {
    #[arg(long, default_value_t = 8)]
    pub m: usize,
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    /// Entry distribution; `quantized` draws integers and implies --exact.
    #[arg(long, value_enum, default_value_t = DistArg::Normal)]
    pub dist: DistArg,
    /// Number of integer levels for `--dist quantized`.
    #[arg(long, default_value_t = 2)]
    pub levels: u32,
    #[command(flatten)]
    #[serde(flatten)]
    pub tolerance: ToleranceArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct ZerosetArgs {
    /// Base series x (CSV, one value per row); free coordinates are overwritten.
    #[arg(long)]
    pub base_x: PathBuf,
    /// Series y (CSV, one value per row).
    #[arg(long)]
    pub base_y: PathBuf,
    /// The two scanned 1-based positions of x, as `i1,i2`.
    #[arg(long, value_parser = parse_free)]
    pub free: (usize, usize),
    /// Range `a:b` of each scanned position; give it twice.
    #[arg(long = "range", num_args = 1, required = true, allow_hyphen_values = true, value_parser = parse_range)]
    pub ranges: Vec<(f64, f64)>,
    /// Grid points per axis.
    #[arg(long, default_value_t = 101)]
    pub res: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tie_eps: f64,
    /// Also write the sign grids as CSV to this file.
    #[arg(long)]
    pub grids: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossArg {
    Identity,
    Squared,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TiePolicyArg {
    First,
    Random,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleArg {
    /// Loss derivative at the squared distance times the path gradient.
    Printed,
    /// Chain rule through the square root of the path cost.
    Strict,
}

#[derive(Debug, Args, Serialize)]
pub struct AverageArgs {
    /// Sample files: CSV (one series each) or JSON (array of series).
    #[arg(required = true)]
    pub samples: Vec<PathBuf>,
    /// Length of the mean; defaults to the length of the first series.
    #[arg(long)]
    pub length: Option<usize>,
    #[arg(long, value_enum, default_value_t = LossArg::Squared)]
    pub loss: LossArg,
    #[arg(long, default_value_t = 50)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.05)]
    pub eta: f64,
    /// Use step size eta / epoch instead of a constant.
    #[arg(long)]
    pub eta_decay: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = TiePolicyArg::Random)]
    pub tie_policy: TiePolicyArg,
    #[arg(long, value_enum, default_value_t = RuleArg::Printed)]
    pub rule: RuleArg,
    #[arg(long, default_value_t = 1e-9)]
    pub tie_eps: f64,
    /// Write the per-epoch cost trace to this file instead of after the mean.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct LvqArgs {
    /// Training series files: CSV (one series each) or JSON (array of series).
    #[arg(required = true)]
    pub series: Vec<PathBuf>,
    /// One integer label per line, in the order of the loaded series.
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub prototypes_per_class: usize,
    #[arg(long, default_value_t = 0.05)]
    pub eta: f64,
    #[arg(long, default_value_t = 10)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    pub tie_eps: f64,
}

fn parse_free(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `i1,i2`, got {s:?}"))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| format!("invalid position {t:?}"))
    };
    Ok((parse(a)?, parse(b)?))
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected `a:b`, got {s:?}"))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("invalid bound {t:?}"))
    };
    Ok((parse(a)?, parse(b)?))
}

/// Runs the command line `argv` (including the program name), writing
/// results to `out` (unless `--output` is given) and diagnostics to `err`.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(rendered.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(rendered.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(&cli) {
        Ok(text) => match emit(cli.output.as_deref(), &text, out) {
            Ok(()) => EXIT_OK,
            Err(e) => report(err, CliError::Runtime(e)),
        },
        Err(e) => report(err, e),
    }
}

/// [`run_with`] on the process's standard streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

fn report(err: &mut dyn Write, e: CliError) -> i32 {
    match e {
        CliError::Usage(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        CliError::Runtime(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_RUNTIME
        }
    }
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), String> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

fn execute(cli: &Cli) -> Result<String, CliError> {
    let config = serde_json::to_value(cli).expect("arguments serialize");
    match &cli.command {
        Command::Dtw(a) => commands::dtw(a, config),
        Command::Delannoy(a) => commands::delannoy(a, config),
        Command::Enumerate(a) => commands::enumerate(a, config),
        Command::Algebra(a) => commands::algebra(a, config),
        Command::Uniqueness(a) => commands::uniqueness(a, config),
        Command::Zeroset(a) => commands::zeroset(a, config),
        Command::Average(a) => commands::average(a, config),
        Command::Lvq(a) => commands::lvq(a, config),
    }
}
