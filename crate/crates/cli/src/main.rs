mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use tevp_core::TevpError;

/// Direct and inverse transmission eigenvalue problems for radially
/// symmetric refractive indices.
#[derive(Parser, Debug)]
#[command(name = "tevp", version, about)]
pub struct Cli {
    /// TOML file; top-level keys and the table named after the subcommand
    /// supply defaults for its flags
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Directory for result files
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Log verbosity (-v info, -vv debug)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Eigenvalues of a given index in a search window
    Direct(DirectArgs),
    /// Recover the travel time delta from eigenvalues
    Delta(DeltaArgs),
    /// Reconstruct n(r) from eigenvalues
    Invert(InvertArgs),
    /// Complete a partial spectrum, optionally inverting the enlarged data
    Complete(CompleteArgs),
    /// Reference characteristic function by direct ODE integration
    Oracle(OracleArgs),
}

#[derive(Args, Debug, Clone)]
pub struct IndexArgs {
    /// Built-in index: ex1, ex2a, ex2b, ex2c, ex3, ex4
    #[arg(long, conflicts_with_all = ["expr", "index_csv"])]
    pub example: Option<String>,
    /// Index as an expression in r, e.g. "1 + 0.5*sin(pi*r)^2"
    #[arg(long, conflicts_with = "index_csv")]
    pub expr: Option<String>,
    /// Two-column CSV (r, n) covering [0, 1]
    #[arg(long, value_name = "FILE")]
    pub index_csv: Option<PathBuf>,
    /// Points of the Liouville grid
    #[arg(long, default_value_t = tevp_core::liouville::DEFAULT_GRID_SIZE)]
    pub grid_size: usize,
    /// Largest truncation order considered
    #[arg(long, default_value_t = tevp_core::nsbf::MAX_TRUNCATION)]
    pub n_max: usize,
}

#[derive(Args, Debug, Clone)]
pub struct WindowArgs {
    /// Right end of the search window
    #[arg(long)]
    pub re_max: Option<f64>,
    /// Strip half-width |Im k| <= C
    #[arg(long)]
    pub strip: Option<f64>,
    /// Smallest box edge of the subdivision
    #[arg(long, default_value_t = tevp_core::roots::DEFAULT_MIN_BOX)]
    pub min_box: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    /// Smallest |k| first
    Lowest,
    /// Real eigenvalues only
    Real,
    /// Upper half-plane eigenvalues only (conjugates are added)
    Complex,
}

/// Eigenvalue data: a CSV file, or eigenvalues of the index computed here.
#[derive(Args, Debug, Clone)]
pub struct SpectrumArgs {
    /// CSV with columns re, im (header optional)
    #[arg(long, value_name = "FILE")]
    pub eigenvalues: Option<PathBuf>,
    /// Number of eigenvalues taken from the index when no file is given
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    #[arg(long, value_enum, default_value_t = Selection::Lowest)]
    pub select: Selection,
    /// Window used to generate eigenvalues from the index
    #[arg(long, default_value_t = 150.0)]
    pub source_re_max: f64,
    #[arg(long, default_value_t = 8.0)]
    pub source_strip: f64,
    /// n(1); taken from the index when omitted
    #[arg(long)]
    pub n1: Option<f64>,
    /// n'(1); taken from the index when omitted
    #[arg(long)]
    pub dn1: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct SearchArgs {
    /// Candidate truncation orders, e.g. 3,4,5
    #[arg(long, value_delimiter = ',')]
    pub orders: Vec<usize>,
    #[arg(long)]
    pub delta_min: Option<f64>,
    #[arg(long)]
    pub delta_max: Option<f64>,
    #[arg(long)]
    pub delta_points: Option<usize>,
    #[arg(long, default_value_t = tevp_core::inverse::DEFAULT_REFINEMENTS)]
    pub refinements: usize,
}

#[derive(Args, Debug)]
pub struct DirectArgs {
    #[command(flatten)]
    pub index: IndexArgs,
    #[command(flatten)]
    pub window: WindowArgs,
    /// Samples of D0N on the real axis for plotting
    #[arg(long, default_value_t = 2001)]
    pub samples: usize,
    /// Also write the coefficient table
    #[arg(long)]
    pub write_coefficients: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Baseline {
    /// Fit to the asymptotics of the real eigenvalues
    Asymptotic,
    /// Counting function of all eigenvalues below --density-radius
    Density,
}

#[derive(Args, Debug)]
pub struct DeltaArgs {
    #[command(flatten)]
    pub index: IndexArgs,
    #[command(flatten)]
    pub spectrum: SpectrumArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Use the reduced system
    #[arg(long)]
    pub reduced: bool,
    /// Closed-form estimates reported next to the search
    #[arg(long, value_enum, value_delimiter = ',')]
    pub baseline: Vec<Baseline>,
    /// Radius of the density estimate; the largest |Re k| by default
    #[arg(long)]
    pub density_radius: Option<f64>,
}

#[derive(Args, Debug)]
pub struct InvertArgs {
    #[command(flatten)]
    pub index: IndexArgs,
    #[command(flatten)]
    pub spectrum: SpectrumArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Known delta; searched for when omitted
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, default_value_t = tevp_core::inverse::DEFAULT_ZETA_POINTS)]
    pub zeta_points: usize,
}

#[derive(Args, Debug)]
pub struct CompleteArgs {
    #[command(flatten)]
    pub index: IndexArgs,
    #[command(flatten)]
    pub spectrum: SpectrumArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    #[command(flatten)]
    pub window: WindowArgs,
    /// Known delta; searched for when omitted
    #[arg(long)]
    pub delta: Option<f64>,
    /// Invert the input enlarged by this many completed eigenvalues
    #[arg(long, value_name = "EXTRA")]
    pub then_invert: Option<usize>,
    #[arg(long, default_value_t = tevp_core::inverse::DEFAULT_ZETA_POINTS)]
    pub zeta_points: usize,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[command(flatten)]
    pub index: IndexArgs,
    #[command(flatten)]
    pub window: WindowArgs,
    /// RK4 steps on [0, 1]
    #[arg(long, default_value_t = tevp_core::shooting::DEFAULT_STEPS)]
    pub steps: usize,
    /// Points "re,im" at which D0 is evaluated instead of searching zeros
    #[arg(long = "k", value_name = "RE,IM", allow_hyphen_values = true)]
    pub points: Vec<String>,
    /// Compare the zeros with the NSBF spectrum of the same window
    #[arg(long)]
    pub compare: bool,
}

/// Failure reported as JSON on stderr.
#[derive(Debug)]
pub struct Failure {
    pub kind: String,
    pub message: String,
    pub validation: bool,
}

impl Failure {
    pub fn validation(message: String) -> Self {
        Failure {
            kind: "InvalidInput".into(),
            message,
            validation: true,
        }
    }

    fn exit_code(&self) -> u8 {
        if self.validation {
            2
        } else {
            3
        }
    }
}

impl From<TevpError> for Failure {
    fn from(e: TevpError) -> Self {
        Failure {
            kind: e.kind().into(),
            message: e.to_string(),
            validation: e.is_validation(),
        }
    }
}

fn report(f: &Failure) -> ExitCode {
    let body = json!({ "error": f.kind, "message": f.message, "exit_code": f.exit_code() });
    eprintln!("{body}");
    ExitCode::from(f.exit_code())
}

fn init_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("TEVP_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Failure::validation(format!("TEVP_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::validation(format!("cannot configure threads: {e}")))
}

fn run(args: Vec<OsString>) -> Result<(), Failure> {
    let args = config::expand(args)?;
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return Ok(());
        }
        Err(e) => {
            return Err(Failure {
                kind: "Usage".into(),
                message: e.to_string().trim().to_string(),
                validation: true,
            })
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    log::debug!("effective arguments: {args:?}");
    init_threads()?;
    commands::dispatch(&cli, &args)
}

fn main() -> ExitCode {
    match run(std::env::args_os().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => report(&f),
    }
}
