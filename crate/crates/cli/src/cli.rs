//! Argument parsing and the four subcommands.
//!
//! Exit status: 0 success, 1 usage error, 2 refused evaluation (region,
//! budget, convergence), 3 failed verification.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mtds_core::complex::{parse_complex, BranchedBase};
use mtds_core::mt::CoefficientSequence;
use mtds_core::verify::{evaluate_point, summarize, Hyperplane, Identity, KmtSetup, RunConfig, DEFAULT_BAND};
use mtds_core::zeta_l::character;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::eval::{
    eval_mt, eval_psi, exit_code, mt_route_name, psi_params_text, psi_route_name, MtRouteChoice, PsiRouteChoice,
};
use crate::grid::GridFile;
use crate::json::{self, Real, Scalar};
use crate::report::{ConfigEcho, KmtEcho, PointReport, PointVerdict, Report, SummaryReport};
use crate::table::{render, Evaluator, SweepPoint};
use crate::text::{fmt_complex, fmt_real, parse_complex_list, parse_range, split_top_level};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_REFUSED: u8 = 2;
pub const EXIT_FAILED: u8 = 3;

/// Thread count for grid and table runs; unset or 0 means automatic.
pub const THREADS_VAR: &str = "MTDS_THREADS";

#[derive(Debug, Parser)]
#[command(name = "mtds", version, about = "Mordell-Tornheim series, Tricomi Psi, and functional-equation checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate L_MT,r(s_1, ..., s_{r+1}) at one point.
    Eval(EvalArgs),
    /// Evaluate the Tricomi function Psi(a, c; x).
    Psi(PsiArgs),
    /// Check an identity over a grid and write a JSON report.
    Verify(VerifyArgs),
    /// Tabulate values over a sweep as CSV.
    Table {
        #[command(subcommand)]
        kind: TableKind,
    },
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Depth.
    #[arg(long)]
    r: usize,
    /// The r + 1 arguments, comma separated, e.g. "1,1,0.5+2i".
    #[arg(long, allow_hyphen_values = true)]
    s: String,
    /// Coefficient sequences, e.g. "ones,char:4:1"; all ones by default.
    #[arg(long)]
    coeffs: Option<String>,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = MtRouteChoice::Auto)]
    route: MtRouteChoice,
    /// Also write the result as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PsiArgs {
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    #[arg(long, allow_hyphen_values = true)]
    c: String,
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    /// Argument of x used for its powers; principal by default.
    #[arg(long, allow_hyphen_values = true)]
    arg: Option<f64>,
    #[arg(long, value_enum, default_value_t = PsiRouteChoice::Auto)]
    route: PsiRouteChoice,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PlaneArg {
    Odd,
    Even,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// One of lemma34_1, thm21, thm22, thm12, cm, kmt.
    #[arg(long)]
    identity: String,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    coeffs: Option<String>,
    /// grid.json with "axes" and "points".
    #[arg(long)]
    grid: Option<PathBuf>,
    /// Extra point, comma separated; may be repeated.
    #[arg(long = "point", allow_hyphen_values = true)]
    points: Vec<String>,
    /// Relative tolerance; 1e-6 at depth two, 1e-5 for thm12 and kmt, 1e-4 deeper.
    #[arg(long)]
    tol: Option<f64>,
    /// Width of the band around pole hyperplanes that is skipped.
    #[arg(long, default_value_t = DEFAULT_BAND)]
    band: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Modulus of the kmt characters.
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    chi1: Option<usize>,
    #[arg(long)]
    chi2: Option<usize>,
    /// Hyperplane s_1 + s_2 = 2k + 1 (odd) or 2k (even).
    #[arg(long, allow_hyphen_values = true)]
    k: Option<i64>,
    #[arg(long, value_enum)]
    plane: Option<PlaneArg>,
    #[arg(long, allow_hyphen_values = true)]
    s1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    s2: Option<String>,
}

#[derive(Debug, Subcommand)]
enum TableKind {
    /// L_MT,r over a sweep; write `t` for the swept argument in --s.
    Mt(TableMtArgs),
    /// Psi(a, c; t x) over a sweep of t.
    Psi(TablePsiArgs),
}

#[derive(Debug, Args)]
struct TableMtArgs {
    #[arg(long)]
    r: usize,
    #[arg(long)]
    coeffs: Option<String>,
    /// Arguments with `t` marking the swept one, e.g. "2,2,t".
    #[arg(long, allow_hyphen_values = true)]
    s: Option<String>,
    /// Sweep start:stop:step.
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    #[arg(long)]
    grid: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = MtRouteChoice::Auto)]
    route: MtRouteChoice,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TablePsiArgs {
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    #[arg(long, allow_hyphen_values = true)]
    c: String,
    /// Scale multiplied by each t.
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    /// grid.json whose points hold one x each.
    #[arg(long)]
    grid: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = PsiRouteChoice::Auto)]
    route: PsiRouteChoice,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A message for stderr and the exit status that goes with it.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

impl From<mtds_core::Error> for Failure {
    fn from(e: mtds_core::Error) -> Self {
        let code = exit_code(&e);
        let message = if code == EXIT_REFUSED { format!("refused: {e}") } else { e.to_string() };
        Failure { code, message }
    }
}

type Outcome = Result<u8, Failure>;

/// Parses `args` (program name first), runs the command and returns the
/// exit status.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let outcome = match cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Psi(a) => cmd_psi(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Table { kind } => cmd_table(kind),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            eprintln!("mtds: {}", f.message);
            f.code
        }
    }
}

fn pool() -> Result<rayon::ThreadPool, Failure> {
    let n = match std::env::var(THREADS_VAR) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| usage(format!("{THREADS_VAR}: expected a thread count, got {v:?}")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| usage(format!("{THREADS_VAR}: {e}")))
}

fn write_output(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn coeff_list(text: Option<&str>, r: usize) -> Result<Vec<CoefficientSequence>, Failure> {
    let Some(text) = text else {
        return Ok(vec![CoefficientSequence::ones(); r]);
    };
    let coeffs = split_top_level(text)
        .into_iter()
        .map(CoefficientSequence::parse)
        .collect::<mtds_core::Result<Vec<_>>>()?;
    if coeffs.len() != r {
        return Err(usage(format!("coeffs: {} sequences for depth {r}", coeffs.len())));
    }
    Ok(coeffs)
}

fn positive_tol(tol: f64) -> Result<(), Failure> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(usage(format!("tol: must be positive, got {tol}")))
    }
}

fn complex_arg(name: &str, text: &str) -> Result<Complex64, Failure> {
    parse_complex(text).map_err(|e| usage(format!("{name}: {e}")))
}

#[derive(Serialize)]
struct EvalRecord {
    s: Vec<Scalar>,
    coeffs: Vec<String>,
    value: Scalar,
    error_bound: Real,
    route: String,
    terms: u64,
}

fn cmd_eval(a: EvalArgs) -> Outcome {
    let s = parse_complex_list(&a.s).map_err(|e| usage(format!("s: {e}")))?;
    if s.len() != a.r + 1 {
        return Err(usage(format!("s: depth {} needs {} arguments, got {}", a.r, a.r + 1, s.len())));
    }
    let coeffs = coeff_list(a.coeffs.as_deref(), a.r)?;
    positive_tol(a.tol)?;
    let v = eval_mt(&s, &coeffs, a.tol, a.route)?;
    println!("value = {}", fmt_complex(v.value));
    println!("error_bound = {}", fmt_real(v.error));
    println!("route = {}", mt_route_name(v.route));
    println!("terms = {}", v.terms);
    if let Some(path) = &a.out {
        let rec = EvalRecord {
            s: s.into_iter().map(Scalar).collect(),
            coeffs: coeffs.iter().map(|c| c.label().to_string()).collect(),
            value: Scalar(v.value),
            error_bound: Real(v.error),
            route: mt_route_name(v.route).into(),
            terms: v.terms,
        };
        write_output(path, &json::to_string(&rec).expect("records serialize"))?;
    }
    Ok(EXIT_OK)
}

fn cmd_psi(a: PsiArgs) -> Outcome {
    let pa = complex_arg("a", &a.a)?;
    let pc = complex_arg("c", &a.c)?;
    let x = complex_arg("x", &a.x)?;
    let base = match a.arg {
        Some(arg) => BranchedBase::with_arg(x, arg)?,
        None => BranchedBase::principal(x),
    };
    let e = eval_psi(pa, pc, &base, a.route)?;
    println!("value = {}", fmt_complex(e.value));
    println!("error_bound = {}", fmt_real(e.error_bound));
    println!("route = {}", psi_route_name(e.route));
    println!("params = {}", psi_params_text(&e.params));
    println!("heuristic = {}", e.heuristic);
    Ok(EXIT_OK)
}

fn default_tol(identity: Identity, r: usize) -> f64 {
    match identity {
        _ if r >= 3 => 1e-4,
        Identity::Thm12 | Identity::Kmt => 1e-5,
        _ => 1e-6,
    }
}

/// Identity, sequences and characters from the flags.
fn verify_config(a: &VerifyArgs) -> Result<(RunConfig, ConfigEcho), Failure> {
    let identity = Identity::parse(&a.identity)?;
    let mut grid = match &a.grid {
        Some(path) => GridFile::load(path).map_err(usage)?,
        None => GridFile::default(),
    };
    for p in &a.points {
        let z = parse_complex_list(p).map_err(|e| usage(format!("point: {e}")))?;
        grid.points.push(z.into_iter().map(Scalar).collect());
    }
    let (coeffs, kmt, echo_kmt) = if identity == Identity::Kmt {
        if a.coeffs.is_some() || a.r.is_some() {
            return Err(usage("kmt takes --q, --chi1, --chi2 and --k instead of --r and --coeffs"));
        }
        let (Some(q), Some(i1), Some(i2), Some(k)) = (a.q, a.chi1, a.chi2, a.k) else {
            return Err(usage("kmt needs --q, --chi1, --chi2 and --k"));
        };
        let plane = a.plane.map(|p| match p {
            PlaneArg::Odd => Hyperplane::Odd,
            PlaneArg::Even => Hyperplane::Even,
        });
        let setup = KmtSetup { chi1: character(q, i1)?, chi2: character(q, i2)?, k, plane };
        if let Some(s1) = &a.s1 {
            let mut p = vec![Scalar(complex_arg("s1", s1)?)];
            if let Some(s2) = &a.s2 {
                p.push(Scalar(complex_arg("s2", s2)?));
            }
            grid.points.push(p);
        }
        let echo = KmtEcho {
            q,
            chi1: i1,
            chi2: i2,
            k,
            plane: a.plane.map(|p| p.to_possible_value().expect("named").get_name().to_string()),
        };
        (Vec::new(), Some(setup), Some(echo))
    } else {
        if a.s1.is_some() || a.s2.is_some() {
            return Err(usage("--s1 and --s2 belong to kmt; use --point or --grid"));
        }
        let coeffs = match identity {
            Identity::Cm => coeff_list(Some(a.coeffs.as_deref().unwrap_or("ones")), 1)?,
            _ => match (a.r, a.coeffs.as_deref()) {
                (Some(r), text) => coeff_list(text, r)?,
                (None, Some(text)) => {
                    let n = split_top_level(text).len();
                    coeff_list(Some(text), n)?
                }
                (None, None) => return Err(usage("give --r or --coeffs")),
            },
        };
        (coeffs, None, None)
    };
    if grid.axes.is_empty() && grid.points.is_empty() && a.grid.is_none() {
        return Err(usage("no points: give --grid, --point or --s1"));
    }
    let tol = a.tol.unwrap_or_else(|| default_tol(identity, coeffs.len()));
    let cfg = RunConfig { identity, coeffs, kmt, grid: grid.to_grid(), tol, band: a.band };
    cfg.validate()?;
    let echo = ConfigEcho {
        identity: identity.name().into(),
        coeffs: cfg.coeffs.iter().map(|c| c.label().to_string()).collect(),
        kmt: echo_kmt,
        tol: Real(tol),
        band: Real(a.band),
        grid,
    };
    Ok((cfg, echo))
}

fn cmd_verify(a: VerifyArgs) -> Outcome {
    let (cfg, echo) = verify_config(&a)?;
    let points = cfg.grid.expand()?;
    let labels: Vec<String> = match &cfg.kmt {
        Some(k) => [&k.chi1, &k.chi2].map(|c| format!("char:{}:{}", c.modulus(), c.index())).to_vec(),
        None => echo.coeffs.clone(),
    };
    let started = Instant::now();
    let records: Vec<_> = pool()?.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(i, p)| evaluate_point(&cfg, i, p))
            .collect()
    });
    let summary = summarize(&records);
    let report = Report {
        identity: echo.identity.clone(),
        config_echo: echo,
        points: records.iter().map(|r| PointReport::from_record(r, &labels)).collect(),
        summary: SummaryReport::from(&summary),
    };
    if let Some(path) = &a.out {
        write_output(path, &report.to_json())?;
    }
    println!(
        "{}: {} points, {} passed, {} failed, {} refused, {} skipped, max rel residual {}",
        report.identity,
        summary.points,
        summary.passed,
        summary.failed,
        summary.refused,
        summary.skipped,
        fmt_real(summary.max_rel_residual)
    );
    eprintln!("wall time {:.2} s", started.elapsed().as_secs_f64());
    match report.worst_offender() {
        None => Ok(EXIT_OK),
        Some(p) => {
            let s: Vec<String> = p.s.iter().map(|z| fmt_complex(z.0)).collect();
            let detail = match (p.verdict, p.rel_residual) {
                (PointVerdict::Fail, Some(r)) => format!("rel residual {} > tol {}", fmt_real(r.0), fmt_real(cfg.tol)),
                _ => p.reason.clone().unwrap_or_default(),
            };
            eprintln!("worst offender: point {} at ({}): {detail}", p.index, s.join(", "));
            Ok(EXIT_FAILED)
        }
    }
}

/// Points from `--s` with `t` placeholders and a `--t` range.
fn placeholder_sweep(s: &str, t: Option<&str>) -> Result<Vec<SweepPoint>, Failure> {
    let items = split_top_level(s);
    let slots: Vec<Option<Complex64>> = items
        .iter()
        .map(|&u| if u == "t" { Ok(None) } else { parse_complex(u).map(Some) })
        .collect::<mtds_core::Result<_>>()
        .map_err(|e| usage(format!("s: {e}")))?;
    let swept = slots.iter().any(Option::is_none);
    match (swept, t) {
        (false, None) => Ok(vec![SweepPoint { t: None, args: slots.into_iter().flatten().collect() }]),
        (false, Some(_)) => Err(usage("--t given but no argument in --s is `t`")),
        (true, None) => Err(usage("--s contains `t`; give the sweep with --t start:stop:step")),
        (true, Some(range)) => {
            let values = parse_range(range)
                .and_then(|r| r.values())
                .map_err(|e| usage(format!("t: {e}")))?;
            Ok(values
                .into_iter()
                .map(|t| SweepPoint {
                    t: Some(t),
                    args: slots.iter().map(|z| z.unwrap_or(Complex64::new(t, 0.0))).collect(),
                })
                .collect())
        }
    }
}

fn grid_sweep(path: &Path, len: usize) -> Result<Vec<SweepPoint>, Failure> {
    let points = GridFile::load(path).map_err(usage)?.to_grid().expand()?;
    points
        .into_iter()
        .enumerate()
        .map(|(i, args)| {
            if args.len() == len {
                Ok(SweepPoint { t: None, args })
            } else {
                Err(usage(format!("grid point {i}: {} coordinates, expected {len}", args.len())))
            }
        })
        .collect()
}

fn cmd_table(kind: TableKind) -> Outcome {
    let (evaluator, points, out) = match kind {
        TableKind::Mt(a) => {
            let coeffs = coeff_list(a.coeffs.as_deref(), a.r)?;
            positive_tol(a.tol)?;
            let points = match (&a.grid, &a.s) {
                (Some(path), None) => grid_sweep(path, a.r + 1)?,
                (None, Some(s)) => placeholder_sweep(s, a.t.as_deref())?,
                _ => return Err(usage("give exactly one of --grid and --s")),
            };
            if let Some(p) = points.iter().find(|p| p.args.len() != a.r + 1) {
                return Err(usage(format!("s: depth {} needs {} arguments, got {}", a.r, a.r + 1, p.args.len())));
            }
            (Evaluator::Mt { coeffs, tol: a.tol, route: a.route }, points, a.out)
        }
        TableKind::Psi(a) => {
            let pa = complex_arg("a", &a.a)?;
            let pc = complex_arg("c", &a.c)?;
            let points = match (&a.grid, &a.x, &a.t) {
                (Some(path), None, None) => grid_sweep(path, 1)?,
                (None, Some(x), t) => {
                    let scale = complex_arg("x", x)?;
                    match t {
                        None => vec![SweepPoint { t: None, args: vec![scale] }],
                        Some(range) => parse_range(range)
                            .and_then(|r| r.values())
                            .map_err(|e| usage(format!("t: {e}")))?
                            .into_iter()
                            .map(|t| SweepPoint { t: Some(t), args: vec![scale * t] })
                            .collect(),
                    }
                }
                _ => return Err(usage("give either --grid or --x with an optional --t")),
            };
            (Evaluator::Psi { a: pa, c: pc, route: a.route }, points, a.out)
        }
    };
    let rows = pool()?.install(|| evaluator.rows(&points)).map_err(|(i, e)| {
        let f = Failure::from(e);
        Failure { message: format!("row {i}: {}", f.message), ..f }
    })?;
    let text = render(&evaluator.columns(), &rows);
    match &out {
        Some(path) => write_output(path, &text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| usage(format!("stdout: {e}")))?;
        }
    }
    Ok(EXIT_OK)
}
