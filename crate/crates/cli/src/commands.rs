use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use pdcontact::fem::{generate, parse_problem, problem_to_bytes, ExampleParams, Support};
use pdcontact::pdsolver::io::HISTORY_SCHEMA_VERSION;
use pdcontact::pdsolver::{pd_accelerated, write_history_csv, SolutionFile};
use pdcontact::verify::{
    build_soclcp, export_matrix_market, oracle_eligible, oracle_enumerate, residual_report, verify_soclcp,
};
use pdcontact::{Error, ProblemInstance, SolverConfig};
use serde::Serialize;

use crate::manifest::Run;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_UNCONVERGED: i32 = 2;
pub const EXIT_NAN: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Example1,
    Example2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Bc {
    Clamped,
    Free,
}

#[derive(Debug, Args, Serialize)]
pub struct GenArgs {
    pub kind: Kind,
    /// Elements across the height; the other counts follow from it.
    #[arg(long)]
    pub n_y: usize,
    #[arg(long)]
    pub traction: Option<f64>,
    #[arg(long)]
    pub gap: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long, value_enum, default_value = "clamped")]
    pub bc: Bc,
    #[arg(long, short)]
    pub out: PathBuf,
}

fn example_params(kind: Kind, n_y: usize) -> ExampleParams {
    match kind {
        Kind::Example1 => ExampleParams::example1(n_y),
        Kind::Example2 => ExampleParams::example2(n_y),
    }
}

pub fn gen(args: &GenArgs, run: &mut Run) -> anyhow::Result<i32> {
    let mut params = example_params(args.kind, args.n_y);
    params.traction = args.traction.unwrap_or(params.traction);
    params.gap = args.gap.unwrap_or(params.gap);
    params.mu = args.mu.unwrap_or(params.mu);
    params.support = match args.bc {
        Bc::Clamped => Support::Clamped,
        Bc::Free => Support::Free,
    };
    let ex = run.time("generate", || generate(&params))?;
    let bytes = problem_to_bytes(&ex.problem, Some(serde_json::to_value(params)?))?;
    run.problem_bytes(&bytes);
    fs::write(&args.out, &bytes).with_context(|| format!("writing {}", args.out.display()))?;
    run.output(&args.out);
    println!(
        "d={} c={} m={} mu={}",
        ex.problem.d(),
        ex.problem.c(),
        ex.problem.m(),
        ex.problem.mu()
    );
    Ok(EXIT_OK)
}

fn load_problem(path: &Path, run: &mut Run) -> anyhow::Result<ProblemInstance> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    run.problem_bytes(&bytes);
    let problem = run
        .time("parse", || parse_problem(&bytes))
        .with_context(|| format!("parsing {}", path.display()))?;
    Ok(problem)
}

#[derive(Debug, Args, Serialize)]
pub struct SolveArgs {
    pub problem: PathBuf,
    #[arg(long, short, default_value = "solution.json")]
    pub out: PathBuf,
    #[arg(long, default_value_t = SolverConfig::default().alpha0)]
    pub alpha0: f64,
    #[arg(long, default_value_t = SolverConfig::default().eps)]
    pub eps: f64,
    #[arg(long, default_value_t = SolverConfig::default().max_outer)]
    pub max_iters: usize,
    #[arg(long, default_value_t = SolverConfig::default().pcg_tol)]
    pub pcg_tol: f64,
    #[arg(long, default_value_t = SolverConfig::default().pcg_maxit)]
    pub pcg_maxit: usize,
    /// Write the convergence history CSV here.
    #[arg(long)]
    pub history: Option<PathBuf>,
    /// Evaluate the full residuals every iteration.
    #[arg(long)]
    pub diagnostics: bool,
}

impl SolveArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            alpha0: self.alpha0,
            eps: self.eps,
            max_outer: self.max_iters,
            pcg_tol: self.pcg_tol,
            pcg_maxit: self.pcg_maxit,
            diagnostics: self.diagnostics,
            ..SolverConfig::default()
        }
    }
}

fn write_history(path: &Path, history: &[pdcontact::pdsolver::IterationRecord], run: &mut Run) -> anyhow::Result<()> {
    let file = fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
    write_history_csv(history, std::io::BufWriter::new(file))?;
    run.history_schema(HISTORY_SCHEMA_VERSION);
    run.output(path);
    Ok(())
}

pub fn solve(args: &SolveArgs, run: &mut Run) -> anyhow::Result<i32> {
    let cfg = args.config();
    cfg.validate()?;
    let problem = load_problem(&args.problem, run)?;
    let sol = match run.time("solve", || pd_accelerated(&problem, &cfg)) {
        Ok(sol) => sol,
        Err(Error::NonFinite { iteration, history }) => {
            if let Some(path) = &args.history {
                write_history(path, &history, run)?;
            }
            return Err(Error::NonFinite { iteration, history }.into());
        }
        Err(e) => return Err(e.into()),
    };
    let report = run.time("residuals", || residual_report(&problem, &sol.du, &sol.r))?;
    println!(
        "iterations={} converged={} resid_eq={:.3e} resid_compl={:.3e} resid_pen={:.3e} free/slip/stick={:.3}/{:.3}/{:.3}",
        sol.iterations,
        sol.converged,
        report.resid_eq,
        report.resid_compl,
        report.resid_pen,
        report.fractions.free,
        report.fractions.slip,
        report.fractions.stick
    );
    SolutionFile::new(&problem, &sol, Some(report)).write(&args.out)?;
    run.output(&args.out);
    if let Some(path) = &args.history {
        write_history(path, &sol.history, run)?;
    }
    if sol.converged {
        Ok(EXIT_OK)
    } else {
        run.warn(format!("stopped at the iteration cap ({})", cfg.max_outer));
        Ok(EXIT_UNCONVERGED)
    }
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    pub problem: PathBuf,
    pub solution: PathBuf,
    /// Also compare against the state-enumeration oracle (planar, at most six nodes).
    #[arg(long)]
    pub oracle: bool,
    /// Absolute threshold for every residual and certificate check.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

fn check_line(name: &str, value: f64, pass: bool) -> bool {
    println!("{} {name}: {value:.3e}", if pass { "PASS" } else { "FAIL" });
    pass
}

pub fn verify(args: &VerifyArgs, run: &mut Run) -> anyhow::Result<i32> {
    if !(args.tol > 0.0 && args.tol.is_finite()) {
        bail!("--tol must be positive");
    }
    let problem = load_problem(&args.problem, run)?;
    let file = SolutionFile::read(&args.solution).with_context(|| format!("reading {}", args.solution.display()))?;
    file.check_against(&problem)
        .with_context(|| format!("{} does not fit the problem", args.solution.display()))?;
    let report = run.time("residuals", || residual_report(&problem, &file.du, &file.r))?;
    let mut ok = true;
    for (name, v) in [
        ("resid_eq", report.resid_eq),
        ("resid_compl", report.resid_compl),
        ("resid_pen", report.resid_pen),
    ] {
        ok &= check_line(name, v, v <= args.tol);
    }
    let f = report.fractions;
    println!("free/slip/stick={:.3}/{:.3}/{:.3}", f.free, f.slip, f.stick);
    let soclcp = run.time("soclcp", || {
        let form = build_soclcp(&problem)?;
        verify_soclcp(&form, &problem, &file.du, &file.r, None, args.tol)
    })?;
    for (name, v, pass) in soclcp.checks() {
        ok &= check_line(&format!("soclcp {name}"), v, pass);
    }
    if args.oracle {
        match oracle_eligible(&problem) {
            Err(e) => run.warn(format!("oracle refused: {e}")),
            Ok(()) => {
                let sols = run.time("oracle", || oracle_enumerate(&problem, 1e-10))?;
                let dist = sols
                    .iter()
                    .map(|s| s.du.iter().zip(&file.du).fold(0.0f64, |a, (x, y)| a.max((x - y).abs())))
                    .fold(f64::INFINITY, f64::min);
                println!("oracle solutions: {}", sols.len());
                ok &= check_line("oracle distance", dist, dist <= 1e-6);
            }
        }
    }
    Ok(if ok { EXIT_OK } else { EXIT_UNCONVERGED })
}

#[derive(Debug, Args, Serialize)]
pub struct ExportArgs {
    pub problem: PathBuf,
    /// Directory for the Matrix Market blocks and their manifest.
    #[arg(long, short)]
    pub out: PathBuf,
}

pub fn export(args: &ExportArgs, run: &mut Run) -> anyhow::Result<i32> {
    let problem = load_problem(&args.problem, run)?;
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let form = run.time("build", || build_soclcp(&problem))?;
    run.time("write", || export_matrix_market(&form, &args.out))?;
    run.output(&args.out);
    println!("nx={} nv={} cones={}", form.nx(), form.nv(), form.cone.describe());
    Ok(EXIT_OK)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Example (I) at N_Y = 4, 8, 16, 26.
    Acceptance,
    /// Both examples on a longer ladder, for iteration growth against d.
    Scaling,
}

#[derive(Debug, Args, Serialize)]
pub struct BenchArgs {
    pub suite: Suite,
    #[arg(long, short)]
    pub out: PathBuf,
    /// Replaces the suite's N_Y ladder (applied to every kind in it).
    #[arg(long, value_delimiter = ',')]
    pub n_y: Option<Vec<usize>>,
    #[arg(long, default_value_t = 0.5)]
    pub mu: f64,
}

#[derive(Debug, Serialize)]
struct BenchRow {
    kind: &'static str,
    n_y: usize,
    mu: f64,
    d: Option<usize>,
    c: Option<usize>,
    iterations: Option<usize>,
    converged: bool,
    resid_eq: Option<f64>,
    resid_compl: Option<f64>,
    resid_pen: Option<f64>,
    free: Option<f64>,
    slip: Option<f64>,
    stick: Option<f64>,
    seconds: f64,
    error: Option<String>,
}

fn bench_one(kind: Kind, n_y: usize, mu: f64) -> BenchRow {
    let start = Instant::now();
    let mut row = BenchRow {
        kind: match kind {
            Kind::Example1 => "example1",
            Kind::Example2 => "example2",
        },
        n_y,
        mu,
        d: None,
        c: None,
        iterations: None,
        converged: false,
        resid_eq: None,
        resid_compl: None,
        resid_pen: None,
        free: None,
        slip: None,
        stick: None,
        seconds: 0.0,
        error: None,
    };
    let result = (|| -> pdcontact::Result<()> {
        let params = ExampleParams {
            mu,
            ..example_params(kind, n_y)
        };
        let problem = generate(&params)?.problem;
        row.d = Some(problem.d());
        row.c = Some(problem.c());
        let sol = pd_accelerated(&problem, &SolverConfig::default())?;
        let rep = residual_report(&problem, &sol.du, &sol.r)?;
        row.iterations = Some(sol.iterations);
        row.converged = sol.converged;
        row.resid_eq = Some(rep.resid_eq);
        row.resid_compl = Some(rep.resid_compl);
        row.resid_pen = Some(rep.resid_pen);
        row.free = Some(rep.fractions.free);
        row.slip = Some(rep.fractions.slip);
        row.stick = Some(rep.fractions.stick);
        Ok(())
    })();
    row.error = result.err().map(|e| e.to_string());
    row.seconds = start.elapsed().as_secs_f64();
    row
}

pub fn bench(args: &BenchArgs, run: &mut Run) -> anyhow::Result<i32> {
    let ladder: Vec<(Kind, Vec<usize>)> = match args.suite {
        Suite::Acceptance => vec![(Kind::Example1, vec![4, 8, 16, 26])],
        Suite::Scaling => vec![
            (Kind::Example1, vec![4, 8, 12, 16, 20, 26]),
            (Kind::Example2, vec![2, 4, 6]),
        ],
    };
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let path = args.out.join(match args.suite {
        Suite::Acceptance => "acceptance.csv",
        Suite::Scaling => "scaling.csv",
    });
    let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
    let mut all_ok = true;
    for (kind, default_ladder) in ladder {
        for &n_y in args.n_y.as_ref().unwrap_or(&default_ladder) {
            let row = run.time(&format!("{kind:?} n_y={n_y}").to_lowercase(), || {
                bench_one(kind, n_y, args.mu)
            });
            println!(
                "{} n_y={} d={:?} iterations={:?} converged={} seconds={:.2}",
                row.kind, row.n_y, row.d, row.iterations, row.converged, row.seconds
            );
            if let Some(e) = &row.error {
                run.warn(format!("{} n_y={}: {e}", row.kind, row.n_y));
            }
            all_ok &= row.converged;
            w.serialize(&row)?;
            w.flush()?;
        }
    }
    run.output(&path);
    Ok(if all_ok { EXIT_OK } else { EXIT_UNCONVERGED })
}

/// Exit code for an error that ended a command.
pub fn error_code(e: &anyhow::Error) -> i32 {
    let nan = e
        .chain()
        .any(|c| matches!(c.downcast_ref::<Error>(), Some(Error::NonFinite { .. })));
    if nan {
        EXIT_NAN
    } else {
        EXIT_INPUT
    }
}
