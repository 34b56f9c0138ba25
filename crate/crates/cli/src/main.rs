//! `hirota`: solution grids, verification, amplitude tables, figure datasets,
//! spectral scalars and direct scattering from the command line.
//!
//! Exit codes: 0 ok, 1 i/o, 2 invalid input, 3 numeric failure,
//! 4 verification failure, 5 figure caption mismatch.

mod commands;
mod parse;

use std::io::IsTerminal;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hirota_core::HirotaError;
use thiserror::Error;

#[derive(Parser)]
#[command(name = "hirota", version, about = "Discrete Hirota equation on a nonzero background")]
struct Cli {
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample a solution on a lattice grid and write CSV/JSON/SVG.
    Solution(SolutionArgs),
    /// Residual, RK4, Lax and scattering checks.
    Verify(VerifyArgs),
    /// Maximal amplitudes from the peak recursions.
    Maxamp(MaxampArgs),
    /// Reproduce a published figure dataset and compare with its caption.
    Figure(FigureArgs),
    /// Spectral scalars zeta, xi, omega at a point.
    Spectral(SpectralArgs),
    /// Eigenvalues and scattering coefficients of a truncated potential.
    Scatter(ScatterArgs),
}

#[derive(Args, Clone, Default)]
pub struct ParamArgs {
    /// Hopping coefficient a [default: 1].
    #[arg(long = "a", allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Hopping coefficient b [default: 0.5].
    #[arg(long = "b", allow_hyphen_values = true)]
    pub b: Option<String>,
    /// Background amplitude A [default: 5/12].
    #[arg(long = "A", allow_hyphen_values = true)]
    pub amp: Option<String>,
    /// Phase B [default: 0]; accepts pi/2 and friends.
    #[arg(long = "B", allow_hyphen_values = true)]
    pub phase: Option<String>,
}

#[derive(Args, Clone, Default)]
pub struct GridArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub n_min: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub n_max: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t_min: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub t_max: Option<String>,
    #[arg(long)]
    pub t_steps: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum FamilyArg {
    Background,
    Soliton1,
    Nfold,
    Rogue,
}

#[derive(Clone, Copy, ValueEnum, Default)]
pub enum SheetArg {
    #[default]
    Principal,
    Other,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum SideArg {
    Upper,
    Lower,
}

/// Where a solution comes from: a JSON spec, a figure id, or inline flags.
#[derive(Args, Clone, Default)]
pub struct SourceArgs {
    /// JSON solution spec (or a report with a "spec" field).
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Figure id such as fig2b or 5c.
    #[arg(long)]
    pub figure: Option<String>,
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Spectral point of a one-soliton.
    #[arg(long, allow_hyphen_values = true)]
    pub z1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub c1: Option<String>,
    /// Comma-separated spectral points of an N-fold solution.
    #[arg(long, allow_hyphen_values = true)]
    pub zs: Option<String>,
    /// Comma-separated translation constants, one per point.
    #[arg(long, allow_hyphen_values = true)]
    pub cs: Option<String>,
    /// Rogue-wave order N.
    #[arg(long)]
    pub order: Option<usize>,
    /// Rogue-wave splitting polynomial coefficients p_0,p_1,... (multiplied by eta).
    #[arg(long, allow_hyphen_values = true)]
    pub eta_poly: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub n0: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t0: Option<String>,
    /// Choose constants so the peak sits at (0, 0).
    #[arg(long)]
    pub peak_tuned: bool,
    #[arg(long, value_enum)]
    pub sheet: Option<SheetArg>,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Args)]
pub struct SolutionArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Output prefix; writes PREFIX.csv and PREFIX.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write PREFIX.svg.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Verify a sampled CSV grid instead; parameters come from the flags.
    #[arg(long, conflicts_with_all = ["spec", "figure"])]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub residual: bool,
    #[arg(long)]
    pub rk4: bool,
    #[arg(long)]
    pub lax: bool,
    #[arg(long)]
    pub scatter: bool,
    /// Half-width of the scattering window.
    #[arg(long, default_value_t = 40)]
    pub half: i64,
}

#[derive(Args)]
pub struct MaxampArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Rogue-wave order N; prints M_1..M_N.
    #[arg(long, conflicts_with = "zs")]
    pub order: Option<usize>,
    /// Comma-separated spectral points; prints the iterated maxima and c1 values.
    #[arg(long, allow_hyphen_values = true)]
    pub zs: Option<String>,
    /// Caption maxima next to the recursion and grid values.
    #[arg(long)]
    pub caption_table: bool,
}

#[derive(Args)]
pub struct FigureArgs {
    /// Figure id (fig2a..fig9c or an alias).
    pub id: Option<String>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// List the known figures.
    #[arg(long)]
    pub list: bool,
    /// Compare against this maximum instead of the registered caption.
    #[arg(long, allow_hyphen_values = true)]
    pub caption: Option<f64>,
    /// Tolerance for --caption [default: the figure's own].
    #[arg(long, requires = "caption")]
    pub tolerance: Option<f64>,
}

#[derive(Args)]
pub struct SpectralArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub z: String,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value = "principal")]
    pub sheet: SheetArg,
    /// Side of the cut for points on it.
    #[arg(long, value_enum)]
    pub side: Option<SideArg>,
}

#[derive(Args)]
pub struct ScatterArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Use a row of a sampled CSV grid as the potential.
    #[arg(long, conflicts_with_all = ["spec", "figure"])]
    pub csv: Option<PathBuf>,
    #[arg(long, default_value_t = 40)]
    pub half: i64,
    /// Time of the potential snapshot.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub t: String,
    /// Search annulus lo,hi; by default every annulus between the branch radii up to 3.
    #[arg(long)]
    pub annulus: Option<String>,
    /// Comma-separated points at which to report a, b, a-bar, b-bar.
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] HirotaError),
    #[error("{0}")]
    Io(String),
    #[error("verify failed: {0}")]
    Verify(String),
    #[error("figure caption mismatch: {0}")]
    Caption(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_)
            | CliError::Core(HirotaError::Invalid(_) | HirotaError::ZeroArgument | HirotaError::CutAmbiguity(_)) => 2,
            CliError::Core(_) => 3,
            CliError::Verify(_) => 4,
            CliError::Caption(_) => 5,
        }
    }
}

/// Output routing: data goes to stdout when piped or with --json; people read stderr.
pub struct Out {
    pub json: bool,
    pub piped: bool,
}

impl Out {
    pub fn info(&self, msg: &str) {
        eprintln!("{msg}");
    }

    /// Emits `text` as data (stdout) or as a message (stderr), or `value` under --json.
    pub fn data(&self, text: &str, value: &serde_json::Value) {
        if self.json {
            stdout(&format!("{}\n", serde_json::to_string_pretty(value).expect("json")));
        } else if self.piped {
            stdout(text);
        } else {
            eprint!("{text}");
        }
    }
}

/// Writes data to stdout; a reader that closed the pipe early ends the process quietly.
pub fn stdout(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: writing stdout: {e}");
        std::process::exit(1);
    }
}

fn apply_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("HIROTA_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| CliError::Usage(format!("HIROTA_THREADS: expected a positive integer, got '{v}'")))?;
        if n == 0 {
            return Err(CliError::Usage("HIROTA_THREADS: must be at least 1".into()));
        }
        hirota_core::set_thread_cap(n);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = Out { json: cli.json, piped: !std::io::stdout().is_terminal() };
    let run = || -> Result<(), CliError> {
        apply_threads()?;
        match cli.cmd {
            Cmd::Solution(a) => commands::solution(a, &out),
            Cmd::Verify(a) => commands::verify(a, &out),
            Cmd::Maxamp(a) => commands::maxamp(a, &out),
            Cmd::Figure(a) => commands::figure(a, &out),
            Cmd::Spectral(a) => commands::spectral(a, &out),
            Cmd::Scatter(a) => commands::scatter(a, &out),
        }
    };
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
