//! `opmono` command-line front end.
//!
//! JSON goes to standard output, diagnostics to standard error. Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success: conditions hold, matrix is central, certificate verified |
//! | 1 | negative answer: non-central witness found, a condition failed, certificate rejected |
//! | 2 | usage, parse or input error |
//! | 3 | numerical failure or output I/O error |

pub mod batch;

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use opmono::function::{default_grid, uniform_grid, DEFAULT_GRID_POINTS};
use opmono::{
    decide, verify_certificate, verify_conditions, witness_2x2, CentralityVerdict, Error, FunctionSeed,
    HermitianMatrix, ViolationCertificate,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

pub const MAX_N_VAR: &str = "OPMONO_MAX_N";
pub const DEFAULT_MAX_N: usize = 256;

#[derive(Parser, Debug)]
#[command(
    name = "opmono",
    version,
    about = "Decide centrality of Hermitian matrices through local monotonicity of matrix functions",
    after_help = "FUNCTIONS:\n  exp         f(x) = e^x on the whole line\n  pow:p=<r>   f(x) = x^p on (0, inf), p > 1"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check positivity, strict increase and log-concavity of f' on a grid
    CheckFn {
        function: String,
        #[arg(long, allow_hyphen_values = true)]
        grid_lo: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        grid_hi: Option<f64>,
        #[arg(long)]
        grid_n: Option<usize>,
    },
    /// Build the 2x2 witness for the spectral pair (x, y)
    Witness {
        function: String,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
    },
    /// Decide centrality of a matrix; exit 1 and print a certificate if non-central
    Decide {
        function: String,
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Re-check a certificate (or a `decide` verdict) against a matrix
    Verify {
        function: String,
        #[arg(long)]
        matrix: PathBuf,
        /// Certificate or verdict JSON; `-` reads standard input
        #[arg(long)]
        cert: PathBuf,
    },
    /// Run randomized decide/verify round trips
    Batch {
        function: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

/// A failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn numerical(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_NUMERICAL,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self {
            code: if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_USAGE },
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<i32, Failure>;

fn max_n() -> Result<usize, Failure> {
    match std::env::var(MAX_N_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("{MAX_N_VAR} must be a positive integer, got `{v}`"))),
        Err(_) => Ok(DEFAULT_MAX_N),
    }
}

fn check_dim(n: usize) -> Result<(), Failure> {
    let cap = max_n()?;
    if n > cap {
        return Err(Failure::usage(format!("dimension {n} exceeds {MAX_N_VAR} = {cap}")));
    }
    Ok(())
}

fn parse_function(spec: &str) -> Result<FunctionSeed, Failure> {
    spec.parse().map_err(|e: Error| Failure::usage(e.to_string()))
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::usage(format!("reading standard input: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("reading {}: {e}", path.display())))
}

fn read_matrix(path: &Path) -> Result<HermitianMatrix, Failure> {
    let text = read_input(path)?;
    let m: HermitianMatrix =
        serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    check_dim(m.dim())?;
    Ok(m)
}

/// Accepts a bare certificate or a `decide` verdict wrapping one.
fn read_certificate(path: &Path) -> Result<ViolationCertificate, Failure> {
    let text = read_input(path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let parsed = if value.get("verdict").is_some() {
        let verdict: CentralityVerdict =
            serde_json::from_value(value).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
        verdict
            .certificate
            .ok_or_else(|| Failure::usage("verdict is Central and carries no certificate"))?
    } else {
        serde_json::from_value(value).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?
    };
    Ok(parsed)
}

fn emit(out: &mut dyn Write, value: &impl Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::numerical(e.to_string()))?;
    writeln!(out, "{text}").map_err(|e| Failure::numerical(format!("writing output: {e}")))
}

fn check_fn(
    out: &mut dyn Write,
    function: &str,
    lo: Option<f64>,
    hi: Option<f64>,
    count: Option<usize>,
) -> CmdResult {
    let seed = parse_function(function)?;
    let grid = if lo.is_none() && hi.is_none() && count.is_none() {
        default_grid(&seed)
    } else {
        let default = default_grid(&seed);
        uniform_grid(
            lo.unwrap_or(default[0]),
            hi.unwrap_or(default[default.len() - 1]),
            count.unwrap_or(DEFAULT_GRID_POINTS),
        )
    };
    let report = verify_conditions(&seed, &grid)?;
    emit(out, &report)?;
    Ok(if report.all_ok() { EXIT_OK } else { EXIT_NEGATIVE })
}

fn witness(out: &mut dyn Write, function: &str, x: f64, y: f64) -> CmdResult {
    let seed = parse_function(function)?;
    let w = witness_2x2(&seed, x, y)?;
    emit(out, &w)?;
    Ok(EXIT_OK)
}

fn decide_cmd(out: &mut dyn Write, function: &str, matrix: &Path) -> CmdResult {
    let seed = parse_function(function)?;
    let a = read_matrix(matrix)?;
    let verdict = decide(&seed, &a)?;
    emit(out, &verdict)?;
    Ok(if verdict.is_central() { EXIT_OK } else { EXIT_NEGATIVE })
}

fn verify_cmd(out: &mut dyn Write, err: &mut dyn Write, function: &str, matrix: &Path, cert: &Path) -> CmdResult {
    let seed = parse_function(function)?;
    let a = read_matrix(matrix)?;
    let cert = read_certificate(cert)?;
    let check = verify_certificate(&seed, &a, &cert);
    emit(out, &check)?;
    for reason in &check.reasons {
        let _ = writeln!(err, "rejected: {reason}");
    }
    Ok(if check.valid { EXIT_OK } else { EXIT_NEGATIVE })
}

fn batch_cmd(
    out: &mut dyn Write,
    err: &mut dyn Write,
    function: &str,
    n: usize,
    count: usize,
    seed: u64,
    csv: Option<&Path>,
) -> CmdResult {
    let f = parse_function(function)?;
    if n < 2 {
        return Err(Failure::usage("--n must be at least 2 for non-central instances"));
    }
    check_dim(n)?;
    let report = batch::run_batch(&f, n, count, seed);
    if let Some(path) = csv {
        batch::emit_csv(&report, path)
            .map_err(|e| Failure::numerical(format!("writing {}: {e}", path.display())))?;
    }
    emit(out, &report)?;
    if report.all_verified() {
        Ok(EXIT_OK)
    } else {
        let failed = report.instances.iter().filter(|r| !r.verified).count();
        let _ = writeln!(err, "{failed} of {count} instances failed verification");
        Ok(EXIT_NUMERICAL)
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };

    let result = match &cli.command {
        Command::CheckFn {
            function,
            grid_lo,
            grid_hi,
            grid_n,
        } => check_fn(out, function, *grid_lo, *grid_hi, *grid_n),
        Command::Witness { function, x, y } => witness(out, function, *x, *y),
        Command::Decide { function, matrix } => decide_cmd(out, function, matrix),
        Command::Verify { function, matrix, cert } => verify_cmd(out, err, function, matrix, cert),
        Command::Batch {
            function,
            n,
            count,
            seed,
            csv,
        } => batch_cmd(out, err, function, *n, *count, *seed, csv.as_deref()),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
