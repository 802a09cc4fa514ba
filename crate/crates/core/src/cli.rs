//! The `connes` command line: `distance`, `coherence`, `sweep` and `verify`.
//!
//! [`run`] does all the work in-process and returns the exit code together
//! with the text destined for stdout and stderr, so the binary is a thin shim.
//! Exit codes: 0 success, 1 failed verification or internal error, 2 bad
//! arguments, 3 incompatible state dimensions.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::fock::SpectralTriple;
use crate::matlib::ComplexMatrix;
use crate::oracle::{supremum_distance, OracleConfig, OracleResult, RNG_NAME};
use crate::spectral::{coherence_sd, distance_1q, distance_1q_value, distance_2q_basis, DistanceResult};
use crate::states::{bloch_to_density, BlochVector, StateSpec};
use crate::verify::{run_verify, VerifyOptions};

pub const SCHEMA_VERSION: &str = "1";

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DIMENSION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "connes", version, about = "Connes spectral distances between qubit states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Distance between two states given in the state grammar.
    Distance(DistanceArgs),
    /// Spectral-distance coherence of a one-qubit state.
    Coherence(CoherenceArgs),
    /// CSV data over a grid of one-qubit state pairs.
    Sweep(SweepArgs),
    /// Run the invariant suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Closed,
    Oracle,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepMode {
    PairGrid,
    ThetaScan,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long, default_value_t = OracleConfig::default().seed)]
    seed: u64,
    /// Number of ascent starts.
    #[arg(long, default_value_t = OracleConfig::default().n_starts)]
    starts: usize,
    /// Iteration budget per start.
    #[arg(long, default_value_t = OracleConfig::default().max_iters)]
    iters: usize,
}

impl OracleArgs {
    fn config(&self) -> Result<OracleConfig, Failure> {
        let cfg = OracleConfig {
            n_starts: self.starts,
            max_iters: self.iters,
            seed: self.seed,
            ..OracleConfig::default()
        };
        cfg.validate().map_err(|e| Failure::usage(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
struct DistanceArgs {
    a: StateSpec,
    b: StateSpec,
    #[arg(long, default_value_t = 1.0, value_parser = parse_hbar)]
    hbar: f64,
    #[arg(long, value_enum, default_value_t = Method::Closed)]
    method: Method,
    #[command(flatten)]
    oracle: OracleArgs,
}

#[derive(Debug, Args)]
struct CoherenceArgs {
    state: StateSpec,
    #[arg(long, default_value_t = 1.0, value_parser = parse_hbar)]
    hbar: f64,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    mode: SweepMode,
    /// Grid points per axis.
    #[arg(long, default_value_t = 64)]
    n: usize,
    /// Add a column with the oracle value for every row.
    #[arg(long)]
    oracle: bool,
    /// Bloch radius of the gridded state (pair-grid, default 1) or |Δr| (theta-scan, default 2).
    #[arg(long)]
    r: Option<f64>,
    /// Fixed state of the pair grid.
    #[arg(long, default_value = "0")]
    a: StateSpec,
    #[arg(long, default_value_t = 1.0, value_parser = parse_hbar)]
    hbar: f64,
    #[command(flatten)]
    oracle_args: OracleArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Reduced sample counts.
    #[arg(long)]
    quick: bool,
    #[arg(long, default_value_t = VerifyOptions::default().seed)]
    seed: u64,
}

fn parse_hbar(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(h) if h.is_finite() && h > 0.0 => Ok(h),
        _ => Err(format!("hbar must be a positive finite number, got `{s}`")),
    }
}

/// One JSON line printed by `distance` and `coherence`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub schema_version: String,
    pub command: String,
    pub inputs: Inputs,
    pub value: f64,
    pub method: String,
    /// True when `value` comes from the oracle alone.
    pub lower_bound_only: bool,
    /// Row-major `[re, im, re, im, ...]`.
    pub element: Option<Vec<f64>>,
    pub ball_norm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparison: Option<Comparison>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nearest_bloch: Option<[f64; 3]>,
    pub metadata: Metadata,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inputs {
    pub states: Vec<StateSpec>,
    pub hbar: f64,
}

/// Oracle next to the closed form, for `--method both`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub closed: f64,
    pub oracle: f64,
    /// `oracle - closed`.
    pub difference: f64,
    pub oracle_element: Vec<f64>,
    pub oracle_ball_norm: f64,
    pub starts_converged: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub seed: Option<u64>,
    pub config: Option<OracleConfig>,
    pub rng: Option<String>,
    pub timing_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: String) -> Self {
        Self {
            code: EXIT_USAGE,
            message,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DimensionMismatch { .. } => EXIT_DIMENSION,
            Error::Parse(_) | Error::InvalidConfig(_) | Error::InvalidHbar(_) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

pub fn run<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            return if e.use_stderr() {
                CliOutput {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                CliOutput {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let result = match cli.command {
        Command::Distance(args) => cmd_distance(&args).and_then(|r| json_line(&r)),
        Command::Coherence(args) => cmd_coherence(&args).and_then(|r| json_line(&r)),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Verify(args) => return cmd_verify(&args),
    };
    match result {
        Ok(stdout) => CliOutput {
            code: 0,
            stdout,
            stderr: String::new(),
        },
        Err(f) => CliOutput {
            code: f.code,
            stdout: String::new(),
            stderr: format!("error: {}\n", f.message),
        },
    }
}

fn json_line(record: &OutputRecord) -> Result<String, Failure> {
    let mut line = serde_json::to_string(record).map_err(|e| Failure {
        code: EXIT_FAILURE,
        message: e.to_string(),
    })?;
    line.push('\n');
    Ok(line)
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn closed_distance(a: &StateSpec, b: &StateSpec, hbar: f64) -> Result<DistanceResult, Failure> {
    match (a.bloch(), b.bloch(), a.basis_bits(), b.basis_bits()) {
        (Some(r1), Some(r2), _, _) => Ok(distance_1q(&r1, &r2, hbar)?),
        (_, _, Some(x), Some(y)) => Ok(distance_2q_basis(x, y, hbar)?),
        _ => Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        }
        .into()),
    }
}

fn oracle_distance(a: &StateSpec, b: &StateSpec, hbar: f64, cfg: &OracleConfig) -> Result<OracleResult, Failure> {
    let triple = SpectralTriple::for_state_dim(a.dim(), hbar)?;
    Ok(supremum_distance(&a.density()?, &b.density()?, &triple, cfg)?)
}

fn interleaved(e: Option<&ComplexMatrix>) -> Option<Vec<f64>> {
    e.map(ComplexMatrix::to_interleaved)
}

fn cmd_distance(args: &DistanceArgs) -> Result<OutputRecord, Failure> {
    let start = Instant::now();
    let (a, b, hbar) = (&args.a, &args.b, args.hbar);
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        }
        .into());
    }
    let inputs = Inputs {
        states: vec![*a, *b],
        hbar,
    };
    let record = |value, method: &str, lower, element, ball_norm, comparison, oracle: Option<OracleConfig>| OutputRecord {
        schema_version: SCHEMA_VERSION.to_string(),
        command: "distance".to_string(),
        inputs: inputs.clone(),
        value,
        method: method.to_string(),
        lower_bound_only: lower,
        element,
        ball_norm,
        comparison,
        nearest_bloch: None,
        metadata: Metadata {
            seed: oracle.map(|c| c.seed),
            config: oracle,
            rng: oracle.map(|_| RNG_NAME.to_string()),
            timing_ms: elapsed_ms(start),
        },
    };
    match args.method {
        Method::Closed => {
            let c = closed_distance(a, b, hbar)?;
            let element = interleaved(c.optimal_element.as_ref());
            Ok(record(c.value, c.method.as_str(), false, element, c.ball_norm_of_element, None, None))
        }
        Method::Oracle => {
            let cfg = args.oracle.config()?;
            let o = oracle_distance(a, b, hbar, &cfg)?;
            let element = Some(o.element.to_interleaved());
            Ok(record(o.value, "oracle", true, element, Some(o.ball_norm), None, Some(cfg)))
        }
        Method::Both => {
            let cfg = args.oracle.config()?;
            let c = closed_distance(a, b, hbar)?;
            let o = oracle_distance(a, b, hbar, &cfg)?;
            let comparison = Comparison {
                closed: c.value,
                oracle: o.value,
                difference: o.value - c.value,
                oracle_element: o.element.to_interleaved(),
                oracle_ball_norm: o.ball_norm,
                starts_converged: o.starts_converged,
            };
            let element = interleaved(c.optimal_element.as_ref());
            Ok(record(
                c.value,
                "both",
                false,
                element,
                c.ball_norm_of_element,
                Some(comparison),
                Some(cfg),
            ))
        }
    }
}

fn cmd_coherence(args: &CoherenceArgs) -> Result<OutputRecord, Failure> {
    let start = Instant::now();
    if args.state.dim() != 2 {
        return Err(Failure {
            code: EXIT_DIMENSION,
            message: "coherence implemented for one qubit only".to_string(),
        });
    }
    let c = coherence_sd(&args.state.density()?, args.hbar)?;
    Ok(OutputRecord {
        schema_version: SCHEMA_VERSION.to_string(),
        command: "coherence".to_string(),
        inputs: Inputs {
            states: vec![args.state],
            hbar: args.hbar,
        },
        value: c.value,
        method: "closed_form".to_string(),
        lower_bound_only: false,
        element: None,
        ball_norm: None,
        comparison: None,
        nearest_bloch: Some(c.nearest_bloch.as_array()),
        metadata: Metadata {
            seed: None,
            config: None,
            rng: None,
            timing_ms: elapsed_ms(start),
        },
    })
}

/// `n` equally spaced angles covering `[0, π]`.
fn theta_grid(n: usize) -> impl Iterator<Item = f64> {
    let step = if n > 1 { std::f64::consts::PI / (n - 1) as f64 } else { 0.0 };
    (0..n).map(move |i| i as f64 * step)
}

fn cmd_sweep(args: &SweepArgs) -> Result<String, Failure> {
    if args.n == 0 {
        return Err(Failure::usage("--n must be at least 1".to_string()));
    }
    let cfg = if args.oracle {
        Some(args.oracle_args.config()?)
    } else {
        None
    };
    let hbar = args.hbar;
    let oracle_value = |r1: &BlochVector, r2: &BlochVector| -> Result<f64, Failure> {
        let cfg = cfg.as_ref().expect("oracle column requested");
        let triple = SpectralTriple::for_state_dim(2, hbar)?;
        Ok(supremum_distance(&bloch_to_density(r1), &bloch_to_density(r2), &triple, cfg)?.value)
    };

    let mut out = String::new();
    match args.mode {
        SweepMode::PairGrid => {
            let r = args.r.unwrap_or(1.0);
            if !(0.0..=1.0).contains(&r) {
                return Err(Failure::usage(format!("--r must lie in [0, 1] for pair-grid, got {r}")));
            }
            let Some(a) = args.a.bloch() else {
                return Err(Failure {
                    code: EXIT_DIMENSION,
                    message: "pair-grid needs a one-qubit state for --a".to_string(),
                });
            };
            out.push_str(if args.oracle { "theta,phi,r,d_closed,d_oracle\n" } else { "theta,phi,r,d_closed\n" });
            for theta in theta_grid(args.n) {
                for j in 0..args.n {
                    let phi = std::f64::consts::TAU * j as f64 / args.n as f64;
                    let b = BlochVector::new(
                        r * theta.sin() * phi.cos(),
                        r * theta.sin() * phi.sin(),
                        r * theta.cos(),
                    )?;
                    let _ = write!(out, "{theta},{phi},{r},{}", distance_1q_value(&a, &b, hbar)?);
                    if args.oracle {
                        let _ = write!(out, ",{}", oracle_value(&a, &b)?);
                    }
                    out.push('\n');
                }
            }
        }
        SweepMode::ThetaScan => {
            let r = args.r.unwrap_or(2.0);
            if !(0.0..=2.0).contains(&r) {
                return Err(Failure::usage(format!("--r must lie in [0, 2] for theta-scan, got {r}")));
            }
            out.push_str(if args.oracle { "theta,r,d_closed,d_oracle\n" } else { "theta,r,d_closed\n" });
            for theta in theta_grid(args.n) {
                // Δr = r (sinθ, 0, cosθ), split symmetrically about the origin.
                let (hx, hz) = (0.5 * r * theta.sin(), 0.5 * r * theta.cos());
                let r1 = BlochVector::new(hx, 0.0, hz)?;
                let r2 = BlochVector::new(-hx, 0.0, -hz)?;
                let _ = write!(out, "{theta},{r},{}", distance_1q_value(&r1, &r2, hbar)?);
                if args.oracle {
                    let _ = write!(out, ",{}", oracle_value(&r1, &r2)?);
                }
                out.push('\n');
            }
        }
    }
    Ok(out)
}

fn cmd_verify(args: &VerifyArgs) -> CliOutput {
    let report = run_verify(VerifyOptions {
        quick: args.quick,
        seed: args.seed,
        ..VerifyOptions::default()
    });
    let mut stdout = report.render();
    stdout.push_str(&report.timing_line());
    stdout.push('\n');
    if report.passed() {
        CliOutput {
            code: 0,
            stdout,
            stderr: String::new(),
        }
    } else {
        CliOutput {
            code: EXIT_FAILURE,
            stdout,
            stderr: format!("error: failed suites: {}\n", report.failed_suites().join(", ")),
        }
    }
}
