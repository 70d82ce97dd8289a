//! The `wigner-lab` command line.
//!
//! Exit codes: 0 success, 1 mathematical failure (a condition failed, a
//! classification was rejected, a suite failed), 2 usage or format error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::Error;
use crate::hermitian::HermitianOperator;
use crate::maps::{self, check_l1_on, check_l2_on, check_l3_on, OperatorMap};
use crate::random;
use crate::recovery::classify_operator;
use crate::semilinear::{SemilinearMap, Sigma};
use crate::subspace::{ortho_complement, Frame};
use crate::verify::{self, Suite};
use crate::xset::{geher_classify_seeded, local_dimension_estimates, xset_sample};

pub const THREADS_ENV: &str = "WIGNER_LAB_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "wigner-lab",
    version,
    about = "Projection-preserving maps on Hermitian matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write an example operator and its ground-truth sidecar.
    Gen(GenArgs),
    /// Check the three projection conditions on an operator file.
    Check(CheckArgs),
    /// Sample X_k(X, Y) and classify the pair.
    Xset(XsetArgs),
    /// Classify an operator and recover U and W.
    Decompose(DecomposeArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GenKind {
    Lu,
    Lperp,
    Luw,
    Collapse,
}

#[derive(Args, Debug)]
struct GenArgs {
    kind: GenKind,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    /// Target projection rank for `luw` (defaults to k + 1).
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value = "id")]
    sigma: Sigma,
    /// Target ambient dimension for `lu` and `luw`.
    #[arg(long = "n-prime")]
    n_prime: Option<usize>,
    /// For `lperp`: compose with a random unitary `L_U`.
    #[arg(long = "compose-lu")]
    compose_lu: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Args, Debug)]
struct XsetArgs {
    #[arg(long)]
    x: PathBuf,
    #[arg(long)]
    y: PathBuf,
    #[arg(long, default_value_t = 20)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Also write the sample to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DecomposeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    suite: Suite,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Ground truth written next to a generated operator.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Truth {
    pub kind: String,
    pub n: usize,
    pub n_prime: usize,
    pub k: usize,
    pub m: usize,
    pub seed: u64,
    #[serde(rename = "U")]
    pub u: Option<SemilinearMap>,
    #[serde(rename = "W")]
    pub w: Option<Frame>,
    #[serde(rename = "P")]
    pub p: Option<HermitianOperator>,
}

/// `op.json -> op.truth.json`; other names get `.truth.json` appended.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let s = out.to_string_lossy();
    match s.strip_suffix(".json") {
        Some(stem) => PathBuf::from(format!("{stem}.truth.json")),
        None => PathBuf::from(format!("{s}.truth.json")),
    }
}

enum Failure {
    Math(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = std::result::Result<i32, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> std::result::Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> std::result::Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| usage(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn emit<T: Serialize>(out: &mut dyn Write, value: &T) -> std::result::Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| usage(e.to_string()))?;
    writeln!(out, "{text}").map_err(|e| usage(e.to_string()))
}

fn rank_arg(given: Option<usize>, stored: Option<usize>) -> std::result::Result<usize, Failure> {
    given
        .or(stored)
        .ok_or_else(|| usage("--k is required when the operator file does not record k"))
}

fn cmd_gen(a: &GenArgs) -> CmdResult {
    let (n, k) = (a.n, a.k);
    if k == 0 || k >= n {
        return Err(usage(format!("need 0 < k < n, got n = {n}, k = {k}")));
    }
    let mut rng = random::rng(a.seed);
    let mut truth = Truth {
        kind: format!("{:?}", a.kind).to_lowercase(),
        n,
        n_prime: n,
        k,
        m: k,
        seed: a.seed,
        u: None,
        w: None,
        p: None,
    };
    let map = match a.kind {
        GenKind::Lu => {
            let np = a.n_prime.unwrap_or(n);
            if np < n {
                return Err(usage("--n-prime must be at least n"));
            }
            let u = SemilinearMap::isometry(random::isometry_into(&mut rng, &Frame::full(np), n), a.sigma)?;
            truth.n_prime = np;
            let l = maps::make_l_u(&u)?.with_ranks(Some(k), Some(k));
            truth.u = Some(u);
            l
        }
        GenKind::Lperp => {
            let perp = maps::make_l_perp(k, n)?;
            truth.m = n - k;
            if a.compose_lu {
                let u = SemilinearMap::isometry(random::unitary(&mut rng, n), a.sigma)?;
                let l = perp.compose(&maps::make_l_u(&u)?)?.with_ranks(Some(k), Some(n - k));
                truth.u = Some(u);
                l
            } else {
                perp
            }
        }
        GenKind::Luw => {
            let m = a.m.unwrap_or(k + 1);
            if m < k {
                return Err(usage("--m must be at least k"));
            }
            let np = a.n_prime.unwrap_or(n + (m - k) + 1);
            if np < n + (m - k) {
                return Err(usage("--n-prime must be at least n + m - k"));
            }
            let w = random::frame(&mut rng, np, m - k);
            let u = SemilinearMap::isometry(random::isometry_into(&mut rng, &ortho_complement(&w), n), a.sigma)?;
            let l = maps::make_l_uw(&u, &w, k)?;
            truth.n_prime = np;
            truth.m = m;
            truth.u = Some(u);
            truth.w = Some(w);
            l
        }
        GenKind::Collapse => {
            let p = maps::random_projection_with(&mut rng, n, k)?;
            let l = maps::make_trace_collapse(&p, k)?;
            truth.p = Some(p);
            l
        }
    };
    write_json(&a.out, &map)?;
    write_json(&sidecar_path(&a.out), &truth)?;
    Ok(0)
}

fn cmd_check(a: &CheckArgs, out: &mut dyn Write) -> CmdResult {
    let l: OperatorMap = read_json(&a.input)?;
    let k = rank_arg(a.k, l.k)?;
    if k == 0 || k >= l.source_dim() {
        return Err(usage(format!("invalid k = {k} for n = {}", l.source_dim())));
    }
    if a.samples < 2 {
        return Err(usage("--samples must be at least 2"));
    }
    let probes = maps::probe_projections(l.source_dim(), k, a.samples, a.seed)?;
    let l1 = check_l1_on(&l, &probes, a.tol)?;
    let m = l1.inferred_m;
    let mut reports = vec![l1.clone(), check_l2_on(&l, &probes, a.tol)?];
    if l1.passed {
        reports.push(check_l3_on(&l, k, m.expect("passing L1 infers m"), &probes, a.tol)?);
    }
    let passed = l1.passed && reports.iter().all(|r| r.passed);
    emit(
        out,
        &json!({
            "k": k,
            "m": m,
            "passed": passed,
            "reports": reports,
        }),
    )?;
    Ok(if passed { 0 } else { 1 })
}

fn cmd_xset(a: &XsetArgs, out: &mut dyn Write) -> CmdResult {
    let x: Frame = read_json(&a.x)?;
    let y: Frame = read_json(&a.y)?;
    if x.rank() != y.rank() || x.ambient_dim() != y.ambient_dim() {
        return Err(usage(format!(
            "frames must have equal rank and ambient dimension ({}/{} vs {}/{})",
            x.rank(),
            x.ambient_dim(),
            y.rank(),
            y.ambient_dim()
        )));
    }
    let tag = geher_classify_seeded(&x, &y, a.tol, a.seed).map_err(|e| Failure::Math(e.to_string()))?;
    let sample = xset_sample(&x, &y, a.count, a.seed, a.tol)?;
    let mut dims = Vec::new();
    let mut agree = true;
    for (i, z) in sample.points.iter().take(3).enumerate() {
        let est = local_dimension_estimates(&x, &y, z, a.tol, a.seed.wrapping_add(i as u64))
            .map_err(|e| Failure::Math(e.to_string()))?;
        agree &= est.jacobian == est.pca;
        dims.push(est);
    }
    if let Some(path) = &a.out {
        write_json(path, &sample)?;
    }
    emit(
        out,
        &json!({
            "tag": tag,
            "members": sample.points.len(),
            "local_dimensions": dims,
            "estimators_agree": agree,
            "sample": sample,
        }),
    )?;
    Ok(if agree { 0 } else { 1 })
}

fn cmd_decompose(a: &DecomposeArgs, out: &mut dyn Write) -> CmdResult {
    let l: OperatorMap = read_json(&a.input)?;
    let k = rank_arg(a.k, l.k)?;
    if a.samples < 2 {
        return Err(usage("--samples must be at least 2"));
    }
    let c = classify_operator(&l, k, a.samples, a.seed, a.tol)?;
    if let Some(path) = &a.out {
        write_json(path, &c)?;
    }
    emit(out, &c)?;
    Ok(if c.is_rejected() { 1 } else { 0 })
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> CmdResult {
    let reports = verify::run(a.suite, a.seed);
    write!(out, "{}", verify::render(&reports, a.seed)).map_err(|e| usage(e.to_string()))?;
    Ok(if reports.iter().all(|r| r.ok()) { 0 } else { 1 })
}

fn configure_threads() -> std::result::Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| usage(format!("{THREADS_ENV} must be a nonnegative integer, got '{raw}'")))?;
    // A pool may already exist when running in-process more than once.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

/// Parses `args` (including the program name), runs the command, and
/// returns the process exit code. Results go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Check(a) => cmd_check(a, out),
        Command::Xset(a) => cmd_xset(a, out),
        Command::Decompose(a) => cmd_decompose(a, out),
        Command::Verify(a) => cmd_verify(a, out),
    });
    match result {
        Ok(code) => code,
        Err(Failure::Math(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}
