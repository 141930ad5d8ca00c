use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use cftlab::correlators::{evaluate, stanev_divergence, CorrelatorRequest, Tag};
use cftlab::lie::{pn_table_within, PnRow, TableBudget, MAX_FLAVORS, MAX_ORDER};
use cftlab::spinor::Dim;
use cftlab::suites::{run_suite, Backend, Config, Suite, SuiteReport, DEFAULT_TOLERANCE, STANEV_TOLERANCE};
use cftlab::{Error, Scalar};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Exit status for usage, schema and budget errors.
const USAGE: u8 = 2;
/// Exit status for mathematical failures.
const FAILURE: u8 = 1;

#[derive(Parser)]
#[command(name = "cftlab", version, about = "Exact checks of Weyl-spinor conformal invariants and correlators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a check suite over seeded random frames.
    Verify(VerifyArgs),
    /// Evaluate a correlator request (JSON file, or - for stdin).
    Eval(EvalArgs),
    /// Tabulate p_n(m) for the Fock-space determinant states.
    Lie(LieArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Identities,
    Invariance,
    Conservation,
    Wick,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Identities => Suite::Identities,
            SuiteArg::Invariance => Suite::Invariance,
            SuiteArg::Conservation => Suite::Conservation,
            SuiteArg::Wick => Suite::Wick,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Exact,
    Float,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Backend {
        match b {
            BackendArg::Exact => Backend::Exact,
            BackendArg::Float => Backend::Float,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Json,
    Csv,
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: SuiteArg,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u8).range(3..=4))]
    dim: u8,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "exact")]
    backend: BackendArg,
    /// Float backend: allowed |residual| relative to the natural scale of each sample.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
    /// Numerator and denominator bound for random rationals.
    #[arg(long, default_value_t = cftlab::suites::DEFAULT_BOUND)]
    bound: i64,
    #[arg(long, value_enum, default_value = "json")]
    format: ReportFormat,
}

#[derive(clap::Args)]
struct EvalArgs {
    request: PathBuf,
    #[arg(long, value_enum, default_value = "exact")]
    backend: BackendArg,
}

#[derive(clap::Args)]
struct LieArgs {
    /// Largest order n (at most 5; n = 5 with m = 8 takes about a minute).
    #[arg(long, default_value_t = 4)]
    n_max: usize,
    #[arg(long, default_value_t = 6)]
    m_max: u32,
    #[arg(long, value_enum, default_value = "json")]
    format: TableFormat,
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

/// Singular configurations are mathematical failures; everything else a
/// request can trigger is a usage or schema problem.
fn eval_exit(e: &Error) -> u8 {
    match e {
        Error::LightconeSingularity { .. }
        | Error::PointAtInfinity(_)
        | Error::DivisionByZero
        | Error::Inconsistent(_) => FAILURE,
        _ => USAGE,
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("CFTLAB_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| format!("CFTLAB_THREADS must be a positive integer, got {v:?}"))?;
    if n == 0 {
        return Err("CFTLAB_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn print_json<T: Serialize>(v: &T) {
    println!("{}", serde_json::to_string_pretty(v).expect("reports serialize"));
}

fn verify(a: VerifyArgs) -> ExitCode {
    if a.trials == 0 {
        return fail(USAGE, "--trials must be at least 1");
    }
    if a.bound < 1 {
        return fail(USAGE, "--bound must be at least 1");
    }
    if !(a.tolerance.is_finite() && a.tolerance >= 0.0) {
        return fail(USAGE, "--tolerance must be a finite non-negative number");
    }
    let dim = if a.dim == 3 { Dim::Three } else { Dim::Four };
    let mut cfg = Config::new(dim, a.trials, a.seed, a.backend.into());
    cfg.tolerance = a.tolerance;
    cfg.bound = a.bound;
    let start = Instant::now();
    let report = match run_suite(a.suite.into(), &cfg) {
        Ok(r) => r,
        Err(e) => return fail(USAGE, e),
    };
    match a.format {
        ReportFormat::Json => print_json(&report),
        ReportFormat::Text => print_text(&report),
    }
    eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(FAILURE)
    }
}

fn print_text(r: &SuiteReport) {
    for c in &r.checks {
        let status = if c.failures == 0 { "ok" } else { "FAIL" };
        println!("{status:4} {:40} {}/{} worst {}", c.check, c.trials - c.failures, c.trials, c.worst);
    }
    println!("{}: {} failures", r.suite, r.failures.len());
}

#[derive(Serialize)]
struct Rendered {
    exact: Option<String>,
    re: f64,
    im: f64,
}

impl Rendered {
    fn of(v: &Scalar) -> Self {
        let z = v.to_complex();
        Rendered { exact: v.is_exact().then(|| v.to_string()), re: z.re, im: z.im }
    }
}

#[derive(Serialize)]
struct Divergence {
    /// Largest |d_alpha J^alpha| over the four slots (float backend).
    residual: f64,
    tolerance: f64,
    within_tolerance: bool,
}

#[derive(Serialize)]
struct EvalResponse {
    id: String,
    value: Rendered,
    #[serde(skip_serializing_if = "Option::is_none")]
    divergence: Option<Divergence>,
}

fn read_request(path: &PathBuf) -> Result<String, String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| format!("stdin: {e}"))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
    }
}

fn eval(a: EvalArgs) -> ExitCode {
    let text = match read_request(&a.request) {
        Ok(t) => t,
        Err(e) => return fail(USAGE, e),
    };
    let req: CorrelatorRequest = match serde_json::from_str(&text) {
        Ok(r) => r,
        Err(e) => return fail(USAGE, format!("request schema: {e}")),
    };
    let parsed = req.to_id().and_then(|id| req.frame.to_frame().map(|f| (id, f)));
    let (id, frame) = match parsed {
        Ok(p) => p,
        Err(e) => return fail(USAGE, format!("request schema: {e}")),
    };
    let frame = match a.backend {
        BackendArg::Exact => frame,
        BackendArg::Float => frame.to_float(),
    };
    let value = match evaluate(&id, &frame) {
        Ok(v) => v,
        Err(e) => return fail(eval_exit(&e), e),
    };
    let divergence = if id.tag == Tag::Stanev4 {
        let f = frame.to_float();
        let mut worst: f64 = 0.0;
        for s in 0..4 {
            match stanev_divergence(&f, s) {
                Ok(d) => worst = worst.max(d.abs_f64()),
                Err(e) => return fail(eval_exit(&e), e),
            }
        }
        Some(Divergence { residual: worst, tolerance: STANEV_TOLERANCE, within_tolerance: worst <= STANEV_TOLERANCE })
    } else {
        None
    };
    print_json(&EvalResponse { id: req.id.to_ascii_uppercase(), value: Rendered::of(&value), divergence });
    ExitCode::SUCCESS
}

fn lie_csv(rows: &[PnRow]) {
    println!("n,c,m,value,fit_residual,interpolation_residual");
    for row in rows {
        for e in &row.entries {
            println!("{},{},{},{},{},{}", row.n, row.c, e.m, e.value, e.fit_residual, e.interpolation_residual);
        }
    }
}

fn lie(a: LieArgs) -> ExitCode {
    let start = Instant::now();
    let budget = TableBudget { n_max: MAX_ORDER, m_max: MAX_FLAVORS };
    let rows = match pn_table_within(a.n_max, a.m_max, budget) {
        Ok(r) => r,
        Err(e) => return fail(USAGE, e),
    };
    match a.format {
        TableFormat::Json => print_json(&rows),
        TableFormat::Csv => lie_csv(&rows),
    }
    eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
    if rows.iter().all(PnRow::residuals_vanish) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(FAILURE)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        return fail(USAGE, e);
    }
    match cli.command {
        Command::Verify(a) => verify(a),
        Command::Eval(a) => eval(a),
        Command::Lie(a) => lie(a),
    }
}
