//! `multalg`: batch front end. Each subcommand reads JSON inputs, runs one
//! core operation and writes a JSON report.
//!
//! Exit status is 0 on success, 2 for invalid input (including malformed
//! JSON, reported with line and column) and 3 when a numerical procedure
//! fails on valid input.

mod commands;
mod failure;
mod input;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use multalg::multipliers::NormMethod;
use serde_json::{json, Value};

use failure::{Failure, Outcome};
use input::Inputs;

#[derive(Parser, Debug)]
#[command(
    name = "multalg",
    version,
    about = "Kernel, multiplier and realization experiments from JSON inputs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: Global,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Tolerance override; each command has its own default.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seed for randomly drawn inputs.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Multiplier norm algorithm.
    #[arg(long, global = true, value_enum, default_value_t = Method::Pencil)]
    pub method: Method,
    /// Use only the first N sample points.
    #[arg(long, global = true)]
    pub max_points: Option<usize>,
    /// Emit a norm-versus-sample-size curve as CSV (mult-norm).
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Bisection,
    Pencil,
}

impl From<Method> for NormMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Bisection => NormMethod::Bisection,
            Method::Pencil => NormMethod::Pencil,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// Realization model specification.
    #[arg(long)]
    pub model: PathBuf,
    /// Run in exact rational arithmetic.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// PSD verdict for a Hermitian matrix.
    PsdCheck {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Gram matrix of a kernel on a sample.
    Gram {
        #[arg(long)]
        kernel: PathBuf,
        #[arg(long)]
        sample: PathBuf,
        /// Also run the PSD test on the result.
        #[arg(long)]
        psd: bool,
    },
    /// Sampled norm of a multiplier between two kernel spaces.
    MultNorm {
        #[arg(long)]
        kernel: PathBuf,
        /// Target kernel; defaults to the source kernel.
        #[arg(long)]
        kernel_e: Option<PathBuf>,
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long)]
        sample: PathBuf,
    },
    /// Necessary condition for a contractive multiplier.
    Contraction {
        #[arg(long)]
        kernel: PathBuf,
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long)]
        sample: PathBuf,
    },
    /// Contraction on K implies contraction on the product kernel KL.
    KlCheck {
        #[arg(long)]
        kernel: PathBuf,
        #[arg(long)]
        kernel_l: PathBuf,
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long)]
        sample: PathBuf,
    },
    /// Sampled von Neumann inequality for p(M_w) on the Hardy space.
    VnCheck {
        #[arg(long)]
        symbol: PathBuf,
        /// Polynomial coefficients, constant term first, e.g. "[0, [0.5, 1]]".
        #[arg(long)]
        poly: String,
        #[arg(long)]
        sample: PathBuf,
        #[arg(long, default_value_t = 4096)]
        grid: usize,
    },
    /// Build a realization model and check very-independence.
    Realize {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Open set around a point in the topology generated by the model.
    TopologyProbe {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        x: usize,
        #[arg(long)]
        eps: f64,
    },
    /// Rank of point evaluations; points are drawn from the seed if omitted.
    RankCheck {
        #[command(flatten)]
        model: ModelArgs,
        /// Point indices, e.g. "[0, 3, 4]".
        #[arg(long)]
        points: Option<String>,
        /// Number of points to draw when none are given.
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        allow_duplicates: bool,
    },
    /// Embed coefficients and recover them; drawn from the seed if omitted.
    Roundtrip {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        coeffs: Option<PathBuf>,
    },
    /// Lipschitz dual norm of a point, or of a difference of two points.
    LipDual {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        x: usize,
        #[arg(long)]
        y: Option<usize>,
    },
    /// Submultiplicativity ratio of the Lipschitz norm.
    Submult {
        #[arg(long)]
        space: PathBuf,
        /// List of complex-valued functions sampled on the space.
        #[arg(long)]
        functions: PathBuf,
    },
    /// Pick feasibility at the given bound and the minimal bound.
    PickSolve {
        #[arg(long)]
        problem: PathBuf,
    },
    /// Uniform interpolation bound on a halving sequence over all 0/1 patterns.
    CarlesonProbe {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0.0)]
        start: f64,
    },
    /// Decide whether a matrix acts as multiplication on a truncated Hardy space.
    DetectMo {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        sample: PathBuf,
    },
    /// Multiplier test for the span of exp and the polynomials.
    ArdyCheck {
        /// Polynomial coefficients, constant term first.
        #[arg(long)]
        poly: String,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::PsdCheck { .. } => "psd-check",
            Command::Gram { .. } => "gram",
            Command::MultNorm { .. } => "mult-norm",
            Command::Contraction { .. } => "contraction",
            Command::KlCheck { .. } => "kl-check",
            Command::VnCheck { .. } => "vn-check",
            Command::Realize { .. } => "realize",
            Command::TopologyProbe { .. } => "topology-probe",
            Command::RankCheck { .. } => "rank-check",
            Command::Roundtrip { .. } => "roundtrip",
            Command::LipDual { .. } => "lip-dual",
            Command::Submult { .. } => "submult",
            Command::PickSolve { .. } => "pick-solve",
            Command::CarlesonProbe { .. } => "carleson-probe",
            Command::DetectMo { .. } => "detect-mo",
            Command::ArdyCheck { .. } => "ardy-check",
        }
    }
}

/// What a command hands back: the parameters it actually used and its result.
pub struct Run {
    pub parameters: Value,
    pub result: Value,
}

fn run(cli: &Cli) -> Outcome<Value> {
    if let Some(t) = cli.global.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Failure::Argument(format!("--tol must be positive, got {t}")));
        }
    }
    if cli.global.max_points == Some(0) {
        return Err(Failure::Argument("--max-points must be positive".into()));
    }
    let started = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0);
    let clock = Instant::now();
    let mut inputs = Inputs::default();
    let Run { mut parameters, result } = commands::dispatch(&cli.command, &cli.global, &mut inputs)?;
    parameters["seed"] = json!(cli.global.seed);
    Ok(json!({
        "command": cli.command.name(),
        "inputs": inputs.into_json(),
        "parameters": parameters,
        "result": result,
        "timestamp": {
            "started_unix_ms": started,
            "wall_clock_ms": clock.elapsed().as_secs_f64() * 1e3,
        },
    }))
}

fn emit(report: &Value, out: Option<&PathBuf>) -> Outcome<()> {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Io {
            path: "<stdout>".into(),
            message: e.to_string(),
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|r| emit(&r, cli.global.out.as_ref())) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.to_json());
            ExitCode::from(f.status())
        }
    }
}
