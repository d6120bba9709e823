//! `specband`: analyze Rhaly and generalized Cesàro operators on weighted
//! c0 spaces from JSON spec files.
//!
//! Exit codes: 0 success, 1 input or evaluation error, 2 refusal (a
//! theorem's hypothesis is not established under `--strict`, or the value
//! is not an eigenvalue), 3 resource limit (`SPECBAND_MAX_N`).

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use specband::analysis::{analyze, eigvec, write_eigvec_csv, AnalyzeOptions, EigenTarget};
use specband::finsec::{truncation_sweep, write_sweep_csv};
use specband::{Error, SpecFile};

#[derive(Parser)]
#[command(name = "specband", version, about = "Spectral analysis of Rhaly and generalized Cesàro operators on weighted c0 spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Boundedness/compactness verdicts and the spectral report, as JSON.
    Analyze {
        spec: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Refuse reports whose hypotheses are not certified (default).
        #[arg(long, conflicts_with = "assume")]
        strict: bool,
        /// Accept uncertified hypotheses, marking them as assumed.
        #[arg(long)]
        assume: bool,
    },
    /// Closed-form eigenvector as CSV (n, x_n, x_n*s_n); summary JSON on stdout.
    Eigvec {
        spec: PathBuf,
        /// Eigenvalue index m (lambda = a_m, or 1/m for C_t).
        #[arg(long, conflicts_with = "lambda", required_unless_present = "lambda")]
        m: Option<usize>,
        /// Eigenvalue; must equal some a_m (or 1/m) to 1e-12 relative.
        #[arg(long, allow_negative_numbers = true)]
        lambda: Option<f64>,
        /// Number of components.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Finite-section sweep over the spec's Ns and lambdas, as CSV.
    Sweep {
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = match error.downcast_ref::<Error>() {
            Some(Error::Refused(_)) => 2,
            Some(Error::Resource { .. }) => 3,
            _ => 1,
        };
        Failure { code, error }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::new(e).into()
    }
}

fn load(path: &Path) -> Result<SpecFile, Failure> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(SpecFile::from_json(&text).with_context(|| format!("parsing {}", path.display()))?)
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display()))?,
        None => io::stdout().write_all(bytes).context("writing stdout")?,
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>, Failure> {
    let mut bytes = serde_json::to_vec_pretty(value).context("serializing JSON")?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Analyze {
            spec,
            common,
            strict,
            assume,
        } => {
            let file = load(&spec)?;
            let a = &file.analysis;
            let strict = if strict || assume { !assume } else { a.strict };
            let options = AnalyzeOptions {
                horizon: common.horizon.unwrap_or(a.horizon),
                tol: common.tol.unwrap_or(a.tol),
                strict,
                chi: a.chi,
                seed: common.seed.unwrap_or(a.seed),
            };
            let report = analyze(&file.operator, &options)?;
            emit(common.out.as_deref(), &to_json(&report)?)?;
            if let (Some(reason), true) = (&report.refusal, strict) {
                eprintln!("refused: {reason}");
                return Ok(2);
            }
            Ok(0)
        }
        Command::Eigvec { spec, m, lambda, n, out } => {
            let file = load(&spec)?;
            let target = match (m, lambda) {
                (Some(m), _) => EigenTarget::Index(m),
                (None, Some(l)) => EigenTarget::Value(l),
                (None, None) => unreachable!("clap requires --m or --lambda"),
            };
            let result = eigvec(&file.operator, target, n)?;
            let mut csv = Vec::new();
            write_eigvec_csv(&file.operator, &result.eigenvector, &mut csv)?;
            emit(Some(&out), &csv)?;
            emit(None, &to_json(&result.summary)?)?;
            Ok(0)
        }
        Command::Sweep { spec, out } => {
            let file = load(&spec)?;
            let records = truncation_sweep(&file.operator, &file.analysis.ns, &file.analysis.lambdas)?;
            let mut csv = Vec::new();
            write_sweep_csv(&records, &mut csv).context("formatting CSV")?;
            emit(out.as_deref(), &csv)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
