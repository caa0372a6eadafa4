use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use geomed::generate::{self, Corrupted};
use geomed::oracles::{central_path_reference, fd_gradient_check, weiszfeld_reference};
use geomed::rng::{seeded, trial_seed};
use geomed::{
    accurate_median, approximate_median, eval_f, eval_ft, weighted_median, MedianResult, Method, Mode,
    PointSet, SolverConfig,
};
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::input::{parse_points, WeightsSpec};
use crate::output::SolveReport;

/// Solver selection. `auto` picks the sampling method when `eps > n^{-1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MethodArg {
    Accurate,
    Stochastic,
    Weiszfeld,
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ModeArg {
    Practical,
    #[value(name = "paper_faithful")]
    PaperFaithful,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Practical => Mode::Practical,
            ModeArg::PaperFaithful => Mode::PaperFaithful,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputArg {
    Json,
    #[value(name = "csv_row")]
    CsvRow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Generator {
    Gaussian,
    Clustered,
    Corrupted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveRequest {
    pub input: PathBuf,
    pub method: MethodArg,
    pub eps: f64,
    pub seed: u64,
    pub mode: ModeArg,
    pub weights: WeightsSpec,
    pub output: OutputArg,
}

fn check_eps(eps: f64) -> CliResult<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(CliError::Argument(format!("--eps must lie in (0, 1), got {eps}")))
    }
}

/// Runs one solver on `ps`.
pub fn solve_points(ps: &PointSet<f64>, method: MethodArg, eps: f64, seed: u64, mode: Mode) -> CliResult<MedianResult<f64>> {
    check_eps(eps)?;
    let cfg = SolverConfig::new(eps, mode)?.with_seed(seed);
    let out = match method {
        MethodArg::Accurate => accurate_median(ps, &cfg)?,
        MethodArg::Stochastic => approximate_median(ps, eps, seed)?,
        MethodArg::Auto => weighted_median(ps, &cfg)?,
        MethodArg::Weiszfeld => {
            let r = weiszfeld_reference(ps, 1e-12)?;
            MedianResult {
                x: r.x,
                objective: r.objective,
                method: Method::Weiszfeld,
                outer_iters: 0,
                inner_evals: 0,
                seed,
            }
        }
    };
    Ok(out)
}

pub fn solve(req: &SolveRequest) -> CliResult<SolveReport> {
    check_eps(req.eps)?;
    let ps = parse_points(&req.input, &req.weights)?;
    let start = Instant::now();
    let result = solve_points(&ps, req.method, req.eps, req.seed, req.mode.into())?;
    Ok(SolveReport {
        result,
        eps: req.eps,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

pub fn run_solve<W: Write>(req: &SolveRequest, out: &mut W) -> CliResult<()> {
    let report = solve(req)?;
    let line = match req.output {
        OutputArg::Json => report.to_json(),
        OutputArg::CsvRow => report.to_csv_row(),
    };
    writeln!(out, "{line}").map_err(|e| CliError::Argument(format!("cannot write output: {e}")))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRequest {
    pub gen: Generator,
    pub min_n: usize,
    pub max_n: usize,
    pub dim: usize,
    pub eps: f64,
    pub seed: u64,
    pub mode: ModeArg,
    pub methods: Vec<MethodArg>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub d: usize,
    pub eps: f64,
    pub method: MethodArg,
    pub wall_ms: f64,
    pub objective_ratio: f64,
}

fn method_name(m: MethodArg) -> &'static str {
    match m {
        MethodArg::Accurate => "accurate",
        MethodArg::Stochastic => "stochastic",
        MethodArg::Weiszfeld => "weiszfeld",
        MethodArg::Auto => "auto",
    }
}

pub fn generate_instance(gen: Generator, n: usize, d: usize, seed: u64) -> CliResult<PointSet<f64>> {
    let mut rng = seeded(seed);
    Ok(match gen {
        Generator::Gaussian => generate::gaussian(n, d, &mut rng)?,
        Generator::Clustered => generate::clustered(n, d, 3, &mut rng)?,
        Generator::Corrupted => {
            let c: Corrupted<f64> = generate::corrupted(n, d, 0.3, 1e6, &mut rng)?;
            c.points
        }
    })
}

/// Thread count from `GEOMED_THREADS`, defaulting to the available cores.
pub fn thread_cap() -> CliResult<usize> {
    match std::env::var("GEOMED_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k > 0 => Ok(k),
            _ => Err(CliError::Argument(format!("GEOMED_THREADS must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |k| k.get())),
    }
}

/// Sizes `min_n, 2 min_n, ...` up to `max_n`.
pub fn bench_sizes(min_n: usize, max_n: usize) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut n = min_n.max(1);
    while n <= max_n {
        sizes.push(n);
        n = match n.checked_mul(2) {
            Some(next) => next,
            None => break,
        };
    }
    sizes
}

pub fn bench(req: &BenchRequest) -> CliResult<Vec<BenchRow>> {
    check_eps(req.eps)?;
    if req.dim == 0 || req.min_n == 0 || req.max_n < req.min_n {
        return Err(CliError::Argument("bench needs d >= 1 and 1 <= min-n <= max-n".into()));
    }
    let sizes = bench_sizes(req.min_n, req.max_n);
    let cells: Vec<(usize, usize, MethodArg)> = sizes
        .iter()
        .enumerate()
        .flat_map(|(si, &n)| req.methods.iter().map(move |&m| (si, n, m)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_cap()?)
        .build()
        .map_err(|e| CliError::Argument(format!("cannot start thread pool: {e}")))?;
    pool.install(|| {
        cells
            .par_iter()
            .enumerate()
            .map(|(ci, &(si, n, method))| {
                // Every method sees the same instance for a given size.
                let ps = generate_instance(req.gen, n, req.dim, trial_seed(req.seed, si as u64))?;
                let f_ref = weiszfeld_reference(&ps, 1e-12)?.objective;
                let start = Instant::now();
                let out = solve_points(&ps, method, req.eps, trial_seed(req.seed, 1_000_000 + ci as u64), req.mode.into())?;
                let wall_ms = start.elapsed().as_secs_f64() * 1e3;
                Ok(BenchRow {
                    n,
                    d: req.dim,
                    eps: req.eps,
                    method,
                    wall_ms,
                    objective_ratio: if f_ref > 0.0 { out.objective / f_ref } else { 1.0 },
                })
            })
            .collect()
    })
}

/// Least-squares slope of `ln wall_ms` against `ln n`.
pub fn loglog_slope(rows: &[(usize, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(_, ms)| *ms > 0.0)
        .map(|&(n, ms)| ((n as f64).ln(), ms.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn run_bench<W: Write>(req: &BenchRequest, out: &mut W) -> CliResult<()> {
    let rows = bench(req)?;
    let io = |e: std::io::Error| CliError::Argument(format!("cannot write output: {e}"));
    writeln!(out, "n,d,eps,method,wall_ms,objective_ratio").map_err(io)?;
    for r in &rows {
        writeln!(
            out,
            "{},{},{},{},{:.3},{}",
            r.n,
            r.d,
            r.eps,
            method_name(r.method),
            r.wall_ms,
            crate::output::fmt17(r.objective_ratio)
        )
        .map_err(io)?;
    }
    for &m in &req.methods {
        let pts: Vec<(usize, f64)> = rows.iter().filter(|r| r.method == m).map(|r| (r.n, r.wall_ms)).collect();
        if let Some(s) = loglog_slope(&pts) {
            writeln!(out, "# slope,{},{s:.4}", method_name(m)).map_err(io)?;
        }
    }
    Ok(())
}

type Check = (&'static str, fn() -> Result<(), String>);

fn square() -> PointSet<f64> {
    PointSet::new(vec![1.0, 1.0, -1.0, 1.0, 1.0, -1.0, -1.0, -1.0], 2).expect("valid square")
}

fn check_square() -> Result<(), String> {
    let r = accurate_median(&square(), &SolverConfig::practical(1e-3).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let best = 4.0 * 2f64.sqrt();
    if r.objective <= best * (1.0 + 1e-3) {
        Ok(())
    } else {
        Err(format!("objective {} above (1 + 1e-3) * {best}", r.objective))
    }
}

fn check_vertex() -> Result<(), String> {
    let ps = PointSet::new(vec![0.0, 1.0, 10.0], 1).map_err(|e| e.to_string())?;
    let r = weiszfeld_reference(&ps, 1e-12).map_err(|e| e.to_string())?;
    if r.objective == 10.0 {
        Ok(())
    } else {
        Err(format!("objective {} instead of 10", r.objective))
    }
}

fn check_against_reference() -> Result<(), String> {
    let ps: PointSet<f64> = generate::clustered(40, 3, 3, &mut seeded(7)).map_err(|e| e.to_string())?;
    let f_ref = weiszfeld_reference(&ps, 1e-12).map_err(|e| e.to_string())?.objective;
    let r = accurate_median(&ps, &SolverConfig::practical(1e-3).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    if r.objective <= (1.0 + 1e-3) * f_ref {
        Ok(())
    } else {
        Err(format!("objective ratio {}", r.objective / f_ref))
    }
}

fn check_weighted_expansion() -> Result<(), String> {
    let base = vec![0.0, 0.0, 4.0, 0.0, 1.0, 3.0];
    let ps = PointSet::new(base.clone(), 2)
        .and_then(|p| p.with_weights(vec![1.0, 2.0, 3.0]))
        .map_err(|e| e.to_string())?;
    let mut expanded = Vec::new();
    for (i, m) in [1, 2, 3].into_iter().enumerate() {
        for _ in 0..m {
            expanded.extend_from_slice(&base[2 * i..2 * i + 2]);
        }
    }
    let multi = PointSet::new(expanded, 2).map_err(|e| e.to_string())?;
    let a = weiszfeld_reference(&ps, 1e-12).map_err(|e| e.to_string())?.objective;
    let b = weiszfeld_reference(&multi, 1e-12).map_err(|e| e.to_string())?.objective;
    if (a - b).abs() <= 1e-9 * b {
        Ok(())
    } else {
        Err(format!("weighted {a} vs expanded {b}"))
    }
}

fn check_gradient() -> Result<(), String> {
    let ps: PointSet<f64> = generate::gaussian(12, 4, &mut seeded(3)).map_err(|e| e.to_string())?;
    let x = [0.3, -0.2, 0.1, 0.5];
    let t = 2.0;
    let ev = eval_ft(&ps, &x, t).map_err(|e| e.to_string())?;
    let f = |p: &[f64]| eval_ft(&ps, p, t).map(|e| e.value).unwrap_or(f64::NAN);
    let err = fd_gradient_check(&f, &ev.grad, &x, 1e-6).map_err(|e| e.to_string())?;
    if err <= 1e-6 {
        Ok(())
    } else {
        Err(format!("relative gradient error {err:e}"))
    }
}

fn check_path_gap() -> Result<(), String> {
    let ps: PointSet<f64> = generate::gaussian(10, 2, &mut seeded(5)).map_err(|e| e.to_string())?;
    let f_ref = weiszfeld_reference(&ps, 1e-12).map_err(|e| e.to_string())?.objective;
    for t in [0.1, 1.0, 10.0, 100.0] {
        let xt = central_path_reference(&ps, t, 1e-12).map_err(|e| e.to_string())?;
        let gap = eval_f(&ps, &xt).map_err(|e| e.to_string())? - f_ref;
        if gap > 2.0 * 10.0 / t + 1e-8 {
            return Err(format!("f(x_t) - f* = {gap} exceeds 2n/t at t = {t}"));
        }
    }
    Ok(())
}

const CHECKS: &[Check] = &[
    ("square_corners", check_square),
    ("vertex_optimum", check_vertex),
    ("accurate_vs_reference", check_against_reference),
    ("weighted_vs_expanded", check_weighted_expansion),
    ("penalized_gradient", check_gradient),
    ("central_path_gap", check_path_gap),
];

/// Runs the built-in checks, printing one line each.
pub fn run_selftest<W: Write>(out: &mut W) -> CliResult<()> {
    let mut failed = Vec::new();
    for (name, check) in CHECKS {
        let line = match check() {
            Ok(()) => format!("ok   {name}"),
            Err(msg) => {
                failed.push(*name);
                format!("FAIL {name}: {msg}")
            }
        };
        writeln!(out, "{line}").map_err(|e| CliError::Argument(format!("cannot write output: {e}")))?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::SelfTest(failed.join(", ")))
    }
}
