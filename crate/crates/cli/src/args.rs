use crate::error::{CliError, CliResult};
use clap::{Args, Parser, Subcommand, ValueEnum};
use necklace_core::Tolerances;
use std::ffi::OsString;
use std::path::PathBuf;

const TOL_PREFIX: &str = "--tol.";

#[derive(Debug, Parser)]
#[command(name = "necklace", version, about = "Critical configurations and Morse indices of oriented area on necklace spaces")]
#[command(after_help = "Tolerance overrides: --tol.NAME VALUE (or --tol.NAME=VALUE), NAME one of \
cyclic, orientation, zero_side, collinear, rank, admissible, bifurcation, stationarity, \
zero_eigen, dedup, scan_per_bead.")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate the critical configurations of a necklace.
    Critical(InstanceArgs),
    /// Enumerate critical configurations and compute their Morse indices two ways.
    Morse(InstanceArgs),
    /// Solve the two-bead case ((n, L), (1, l)) through Chebyshev polynomials.
    TwoBead(TwoBeadArgs),
    /// Classify a polygon as a singular or smooth configuration of a necklace.
    SingularCheck(SingularArgs),
    /// Run randomized consistency checks on generated necklaces.
    Verify(VerifyArgs),
    /// Draw every configuration of a result file as SVG.
    Render(RenderArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write results here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct InstanceArgs {
    /// Necklace instance: {"pieces": [{"beads": 2, "length": 1.5}, ...]}.
    #[arg(long)]
    pub instance: PathBuf,
    /// Largest |winding number| tried (default: exhaustive bound).
    #[arg(long)]
    pub max_winding: Option<u64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct TwoBeadArgs {
    /// Beads n on the long piece.
    #[arg(long)]
    pub beads: usize,
    /// Length L of the long piece.
    #[arg(long)]
    pub length: f64,
    /// Length l of the closing side.
    #[arg(long)]
    pub closing: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SingularArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Polygon file: {"vertices": [[x, y], ...]}.
    #[arg(long)]
    pub polygon: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of random necklaces.
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    /// Largest bead count of a generated necklace.
    #[arg(long, default_value_t = 6)]
    pub max_beads: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Result file written by `critical` or `morse` (JSON).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub render_dir: PathBuf,
    /// Image width and height in pixels.
    #[arg(long, default_value_t = 480)]
    pub size: u32,
    /// Leave out the circumscribed circle and its centre.
    #[arg(long)]
    pub no_circle: bool,
}

/// Strips `--tol.NAME VALUE` pairs from `argv` and applies them to the
/// default tolerances.
pub fn split_tolerances(argv: Vec<OsString>) -> CliResult<(Vec<OsString>, Tolerances)> {
    let mut tols = Tolerances::default();
    let mut rest = Vec::with_capacity(argv.len());
    let mut iter = argv.into_iter();
    while let Some(arg) = iter.next() {
        let Some(text) = arg.to_str().and_then(|s| s.strip_prefix(TOL_PREFIX)) else {
            rest.push(arg);
            continue;
        };
        let (name, value) = match text.split_once('=') {
            Some((n, v)) => (n.to_string(), v.to_string()),
            None => {
                let name = text.to_string();
                let value = iter
                    .next()
                    .and_then(|v| v.into_string().ok())
                    .ok_or_else(|| CliError::Input(format!("missing value for {TOL_PREFIX}{name}")))?;
                (name, value)
            }
        };
        let value: f64 = value
            .parse()
            .map_err(|_| CliError::Input(format!("{TOL_PREFIX}{name}: not a number: {value}")))?;
        tols.set(&name, value)?;
    }
    Ok((rest, tols))
}
