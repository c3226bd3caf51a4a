//! `qrmat`: build R-matrices, run verification suites and curve sweeps.
//!
//! Exit codes: 0 success, 1 a check failed, 2 invalid configuration, 3 pole or singular
//! evaluation. Codes 2 and 3 come with a one-line JSON error on stderr.

mod params;
mod suites;
mod sweep;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use qrmat::cpotts::{
    curve_residual, export_boltzmann, r_semicyclic, semicyclic_intertwine_residual, CurveSpec, LambdaConvention,
};
use qrmat::qnum::QParam;
use qrmat::raffine::{r_spectral, SpectralOptions};
use qrmat::report::{RMatrixDocument, RMatrixFamily};
use qrmat::repspace::{semicyclic, truncated_verma};
use qrmat::rfinite::{r_reshetikhin_product, r_verma_direct, ReshetikhinCoefficient};
use qrmat::{Error, Result};

use params::{parse_complex, parse_depths, parse_z_list, qparam};
use suites::{CurveSweep, Suite, SuiteArgs};

#[derive(Parser, Debug)]
#[command(name = "qrmat", version, about = "Quantum group R-matrices: construction and numerical checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build an R-matrix and write it as JSON.
    Rmatrix(RmatrixArgs),
    /// Run a verification suite and write a JSON report.
    Verify(VerifyArgs),
    /// Sweep curve parameters and write CSV.
    Sweep(SweepCli),
}

#[derive(Args, Debug, Clone)]
struct QArgs {
    /// Generic q as "re,im".
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    /// Order N' of the root of unity q = exp(2πi/N').
    #[arg(long = "Nprime")]
    nprime: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Verma,
    Reshetikhin,
    Spectral,
    Semicyclic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Coefficient {
    QDifference,
    InverseOneMinus,
    ParitySigned,
}

impl From<Coefficient> for ReshetikhinCoefficient {
    fn from(c: Coefficient) -> Self {
        match c {
            Coefficient::QDifference => ReshetikhinCoefficient::QDifference,
            Coefficient::InverseOneMinus => ReshetikhinCoefficient::InverseOneMinus,
            Coefficient::ParitySigned => ReshetikhinCoefficient::ParitySigned,
        }
    }
}

#[derive(Args, Debug)]
struct RmatrixArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[command(flatten)]
    q: QArgs,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    lambda1: String,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    lambda2: String,
    /// Truncation depths "d1,d2" of the Verma modules.
    #[arg(long, default_value = "2,2")]
    depths: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    alpha1: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    alpha2: String,
    /// Spectral parameters: "re[,im]" separated by ';', or "roots:N".
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    z: String,
    /// Multiply R(z) by q^{½H⊗H} (spectral kind; always on for semicyclic).
    #[arg(long)]
    cartan: bool,
    #[arg(long, value_enum, default_value = "q-difference")]
    coefficient: Coefficient,
    /// For the semicyclic kind, write a Boltzmann-weight document instead.
    #[arg(long)]
    boltzmann: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(value_enum)]
    suite: Suite,
    #[command(flatten)]
    q: QArgs,
    #[arg(long)]
    depths: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Overrides the suite tolerances (also read from QRMAT_TOLERANCE).
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long, value_enum, default_value = "both")]
    sweep: CurveSweep,
    /// Number of random draws per curve sweep.
    #[arg(long)]
    count: Option<usize>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepCli {
    #[arg(long = "Nprime", default_value_t = 3)]
    nprime: u32,
    /// Grid axis "name=lo:hi:count" (lambda1, lambda2, alpha1, alpha2); repeatable.
    #[arg(long)]
    grid: Vec<String>,
    #[arg(long, default_value = "0.7", allow_hyphen_values = true)]
    lambda1: String,
    #[arg(long, default_value = "0.7", allow_hyphen_values = true)]
    lambda2: String,
    #[arg(long, default_value = "0.5", allow_hyphen_values = true)]
    alpha1: String,
    #[arg(long, default_value = "0.5", allow_hyphen_values = true)]
    alpha2: String,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    z: String,
    /// Put the second module on the curve through the first.
    #[arg(long)]
    partner_on_curve: bool,
    /// Use this many seeded random points instead of the grid.
    #[arg(long)]
    draws: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    kind: String,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_singularity() { 3 } else { 2 };
        Failure { code, kind: e.kind().into(), message: e.to_string() }
    }
}

fn io_failure(e: io::Error) -> Failure {
    Failure { code: 2, kind: "io".into(), message: e.to_string() }
}

fn sink(path: &Option<PathBuf>) -> std::result::Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(io_failure)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn write_json(path: &Option<PathBuf>, value: &impl serde::Serialize) -> std::result::Result<(), Failure> {
    let mut out = sink(path)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Failure::from(Error::Format(e.to_string())))?;
    writeln!(out).and_then(|_| out.flush()).map_err(io_failure)
}

fn pair_depths(s: &str) -> Result<(usize, usize)> {
    match parse_depths(s)?.as_slice() {
        [a, b] => Ok((*a, *b)),
        [a] => Ok((*a, *a)),
        _ => Err(Error::InvalidParameter("rmatrix needs two depths".into())),
    }
}

fn cmd_rmatrix(a: &RmatrixArgs) -> std::result::Result<u8, Failure> {
    let default_root = || match a.kind {
        Kind::Reshetikhin | Kind::Semicyclic => QParam::root_of_unity(3),
        _ => QParam::generic(C64::new(1.3, 0.0)),
    };
    let qp = qparam(a.q.q.as_deref(), a.q.nprime, default_root)?;
    let (l1, l2) = (parse_complex(&a.lambda1)?, parse_complex(&a.lambda2)?);
    let (d1, d2) = pair_depths(&a.depths)?;
    match a.kind {
        Kind::Verma | Kind::Reshetikhin => {
            let (r1, r2) = (truncated_verma(l1, d1, &qp)?, truncated_verma(l2, d2, &qp)?);
            let (r, name) = if a.kind == Kind::Verma {
                (r_verma_direct(&r1, &r2)?, "verma")
            } else {
                (r_reshetikhin_product(&r1, &r2, a.coefficient.into())?, "reshetikhin")
            };
            write_json(&a.output, &RMatrixDocument::new(name, qp.mode(), &[&r1, &r2], None, true, &r))?;
        }
        Kind::Spectral => {
            let (r1, r2) = (truncated_verma(l1, d1, &qp)?, truncated_verma(l2, d2, &qp)?);
            let opts = SpectralOptions { include_cartan_factor: a.cartan };
            let mut docs = Vec::new();
            for z in parse_z_list(&a.z)? {
                let r = r_spectral(z, &r1, &r2, opts)?;
                docs.push(RMatrixDocument::new("spectral", qp.mode(), &[&r1, &r2], Some(z), a.cartan, &r));
            }
            emit_family(&a.output, docs)?;
        }
        Kind::Semicyclic => {
            let nprime = qp.nprime().ok_or_else(|| Error::InvalidParameter("semicyclic R needs --Nprime".into()))?;
            let (al1, al2) = (parse_complex(&a.alpha1)?, parse_complex(&a.alpha2)?);
            let (s1, s2) = (semicyclic(al1, l1, &qp)?, semicyclic(al2, l2, &qp)?);
            let mut docs = Vec::new();
            for z in parse_z_list(&a.z)? {
                let r = r_semicyclic(z, &s1, &s2, SpectralOptions::with_cartan())?;
                if a.boltzmann {
                    let spec = CurveSpec {
                        nprime,
                        z,
                        lambda1: l1,
                        lambda2: l2,
                        alpha1: al1,
                        alpha2: al2,
                        beta1: None,
                        beta2: None,
                    };
                    let cr = curve_residual(&spec, LambdaConvention::KPower)?;
                    let res = semicyclic_intertwine_residual(z, &s1, &s2, &r)?;
                    write_json(&a.output, &export_boltzmann(&r, &spec, Some(cr), Some(res)))?;
                    return Ok(0);
                }
                docs.push(RMatrixDocument::new("semicyclic", qp.mode(), &[&s1, &s2], Some(z), true, &r));
            }
            emit_family(&a.output, docs)?;
        }
    }
    Ok(0)
}

fn emit_family(path: &Option<PathBuf>, mut docs: Vec<RMatrixDocument>) -> std::result::Result<(), Failure> {
    if docs.len() == 1 {
        write_json(path, &docs.remove(0))
    } else {
        write_json(path, &RMatrixFamily::new(docs))
    }
}

fn cmd_verify(a: &VerifyArgs) -> std::result::Result<u8, Failure> {
    let qp = match (a.q.q.as_deref(), a.q.nprime) {
        (None, None) => None,
        (q, n) => Some(qparam(q, n, || unreachable!())?),
    };
    let depths = a.depths.as_deref().map(parse_depths).transpose()?;
    params::tolerance(a.tolerance, 1.0)?;
    let args = SuiteArgs { qp, depths, seed: a.seed, tolerance: a.tolerance, sweep: a.sweep, count: a.count };
    let report = suites::run(a.suite, &args)?;
    write_json(&a.output, &report)?;
    Ok(if report.all_pass { 0 } else { 1 })
}

fn cmd_sweep(a: &SweepCli) -> std::result::Result<u8, Failure> {
    QParam::root_of_unity(a.nprime)?;
    let axes = a.grid.iter().map(|g| sweep::parse_axis(g)).collect::<Result<Vec<_>>>()?;
    let base = CurveSpec {
        nprime: a.nprime,
        z: parse_complex(&a.z)?,
        lambda1: parse_complex(&a.lambda1)?,
        lambda2: parse_complex(&a.lambda2)?,
        alpha1: parse_complex(&a.alpha1)?,
        alpha2: parse_complex(&a.alpha2)?,
        beta1: None,
        beta2: None,
    };
    let args = sweep::SweepArgs { nprime: a.nprime, base, axes, partner_on_curve: a.partner_on_curve, draws: a.draws, seed: a.seed };
    let out = sink(&a.output)?;
    sweep::run(&args, out)?;
    Ok(0)
}

fn fail(f: Failure) -> ExitCode {
    let line = serde_json::json!({ "error": f.kind, "message": f.message, "exit_code": f.code });
    eprintln!("{line}");
    ExitCode::from(f.code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.to_string().lines().next().unwrap_or("invalid arguments").to_string();
            return fail(Failure { code: 2, kind: "usage".into(), message });
        }
    };
    let result = match &cli.command {
        Command::Rmatrix(a) => cmd_rmatrix(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Sweep(a) => cmd_sweep(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => fail(f),
    }
}
