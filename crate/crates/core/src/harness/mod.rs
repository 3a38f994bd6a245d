//! Experiment driver behind the `ipgm` binary.
//!
//! A config describes one problem instance and a grid of cells
//! `(Δ, q, repeat)`. Each cell builds its oracle, runs a solver, samples the
//! matching bound and reports a summary row. Cells run on a rayon pool.

mod config;

pub use config::{
    Algorithm, CertifySpec, ExperimentConfig, OracleKind, OracleSpec, OutputSpec, ProblemSpec, SolverSpec,
    CONFIG_VERSION,
};

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::objective::SmoothObjective;
use crate::oracle::{certify_oracle, CertificationReport, ExactOracle, InexactOracle, L1BallSampler, BoxSampler, NoisyGradientOracle, PairSampler};
use crate::problems::{generate_logsum_instance, generate_quadratic_instance, LogSumProblem, QuadraticProblem};
use crate::prox::ProxFunction;
use crate::random::derive_seed;
use crate::rates::{bound_cor1_const, bound_thm2, cor1_plateau, evaluate_curve, BoundCurve, CurveKind, CurveParams};
use crate::solver::{fipgm_run, ipgm_adaptive_run, ipgm_run, ipgm_worst_case_run, RunTrace, ScheduleConfig};

/// Environment variable holding the worker count for grid sweeps.
pub const WORKERS_ENV: &str = "IPGM_WORKERS";

pub const SUMMARY_CSV_HEADER: &str =
    "q,noise_bound,delta_eff,repeat,seed,status,final_min_gm_sq,plateau,bound_plateau,dominated";

pub const PLATEAU_CSV_HEADER: &str = "q,noise_bound,delta_eff,median_plateau,bound_plateau,all_dominated";

/// Half-width of the box used to certify oracles on unconstrained problems.
pub const CERTIFY_BOX: f64 = 4.0;

/// A generated problem instance with its simple term `h`.
#[derive(Debug, Clone)]
pub enum Instance {
    LogSum(Arc<LogSumProblem>),
    Quadratic(Arc<QuadraticProblem>),
}

impl Instance {
    pub fn build(spec: &ProblemSpec) -> Result<Self> {
        Ok(match *spec {
            ProblemSpec::LogSum {
                n,
                big_n,
                radius,
                seed,
                noise_level,
            } => Self::LogSum(Arc::new(generate_logsum_instance(n, big_n, radius, noise_level, seed)?)),
            ProblemSpec::Quadratic { n, conditioning, seed } => {
                Self::Quadratic(Arc::new(generate_quadratic_instance(n, conditioning, seed)?))
            }
        })
    }

    pub fn objective(&self) -> &dyn SmoothObjective {
        match self {
            Self::LogSum(p) => p.as_ref(),
            Self::Quadratic(p) => p.as_ref(),
        }
    }

    pub fn dim(&self) -> usize {
        self.objective().dim()
    }

    pub fn lipschitz(&self) -> f64 {
        self.objective().lipschitz()
    }

    /// Radius of the ℓ1 ball constraint, if any.
    pub fn radius(&self) -> Option<f64> {
        match self {
            Self::LogSum(p) => Some(p.radius()),
            Self::Quadratic(_) => None,
        }
    }

    pub fn prox(&self) -> Result<ProxFunction> {
        match self.radius() {
            Some(r) => ProxFunction::l1_ball(r),
            None => Ok(ProxFunction::Zero),
        }
    }

    /// A lower bound `f∞` on `F + h`.
    pub fn lower_bound(&self) -> f64 {
        match self {
            Self::LogSum(_) => 0.0,
            Self::Quadratic(p) => p.optimal_value(),
        }
    }

    /// Starting point: the origin, which is feasible for every family.
    pub fn start(&self) -> Vec<f64> {
        vec![0.0; self.dim()]
    }

    /// Certificate accuracy `δ` delivered for noise bound `Δ` at degree `q`.
    pub fn delta_eff(&self, kind: OracleKind, q: f64, noise_bound: f64) -> f64 {
        match (kind, self.radius()) {
            (OracleKind::Exact, _) => 0.0,
            (OracleKind::NoisyGradient, Some(r)) => noise_bound * (2.0 * r).powf(1.0 - q),
            (OracleKind::NoisyGradient, None) => noise_bound,
        }
    }

    pub fn oracle(&self, spec: &OracleSpec, q: f64, noise_bound: f64) -> Result<Box<dyn InexactOracle>> {
        let l = self.lipschitz();
        Ok(match (spec.family, self) {
            (OracleKind::Exact, Self::LogSum(p)) => Box::new(ExactOracle::new(p.clone(), l, q)?),
            (OracleKind::Exact, Self::Quadratic(p)) => Box::new(ExactOracle::new(p.clone(), l, q)?.convex()),
            (OracleKind::NoisyGradient, Self::LogSum(p)) => Box::new(
                NoisyGradientOracle::new(p.clone(), noise_bound)?
                    .on_ball(p.radius(), q)?
                    .with_claim_scale(spec.claim_scale),
            ),
            (OracleKind::NoisyGradient, Self::Quadratic(p)) => {
                Box::new(NoisyGradientOracle::new(p.clone(), noise_bound)?.with_claim_scale(spec.claim_scale))
            }
        })
    }

    fn sampler(&self) -> Box<dyn PairSampler> {
        match self.radius() {
            Some(radius) => Box::new(L1BallSampler { dim: self.dim(), radius }),
            None => Box::new(BoxSampler {
                dim: self.dim(),
                lo: -CERTIFY_BOX,
                hi: CERTIFY_BOX,
            }),
        }
    }
}

/// One grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cell {
    pub degree: f64,
    pub noise_bound: f64,
    pub repeat: usize,
    pub seed: u64,
}

impl Cell {
    pub fn file_stem(&self) -> String {
        format!("q{}_delta{}_r{}", self.degree, self.noise_bound, self.repeat)
    }
}

/// Cells ordered by `Δ`, then `q`, then repeat.
///
/// The seed depends on `(master, Δ, repeat)` only, so all degrees in a column
/// share noise streams and adding cells never changes existing ones.
pub fn grid(config: &ExperimentConfig) -> Vec<Cell> {
    let mut cells = Vec::new();
    for noise_bound in config.noise_grid() {
        for &degree in &config.oracle.degrees {
            for repeat in 0..config.repeats {
                cells.push(Cell {
                    degree,
                    noise_bound,
                    repeat,
                    seed: derive_seed(config.master_seed, &[noise_bound.to_bits(), repeat as u64]),
                });
            }
        }
    }
    cells
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    Diverged,
    Failed,
}

impl CellStatus {
    pub fn name(self) -> &'static str {
        match self {
            Self::Ok => "ok",
            Self::Diverged => "diverged",
            Self::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub cell: Cell,
    pub delta_eff: f64,
    pub status: CellStatus,
    pub message: Option<String>,
    pub final_min_gm_sq: Option<f64>,
    pub plateau: Option<f64>,
    pub bound_plateau: Option<f64>,
    /// Whether `min_gm_sq ≤ bound` at every iteration, when a bound applies.
    pub dominated: Option<bool>,
}

/// Full output of one cell.
#[derive(Debug, Clone)]
pub struct CellRun {
    pub summary: CellSummary,
    pub trace: Option<RunTrace>,
    pub bounds: Option<Vec<f64>>,
}

/// Mean of the final `fraction` of `values` (at least one entry).
pub fn plateau(values: &[f64], fraction: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let take = ((values.len() as f64 * fraction).ceil() as usize).clamp(1, values.len());
    let tail = &values[values.len() - take..];
    Some(tail.iter().sum::<f64>() / take as f64)
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[m]
    } else {
        0.5 * (values[m - 1] + values[m])
    })
}

/// Schedule used by a cell.
pub fn schedule_for(config: &ExperimentConfig, instance: &Instance, cell: &Cell) -> ScheduleConfig {
    let l = instance.lipschitz();
    let s = &config.solver;
    ScheduleConfig {
        lipschitz: l,
        rho: s.rho.unwrap_or(l),
        degree: cell.degree,
        delta0: instance.delta_eff(config.oracle.family, cell.degree, cell.noise_bound),
        beta: s.beta,
        zeta: s.zeta,
        max_iters: s.iterations,
        step_scale: s.step_scale,
    }
}

/// Per-iteration bound on `min_{j≤k} ‖g_j + p_{j+1}‖²`, when one applies.
///
/// Available for plain and worst-case I-PGM at `step_scale = ½`. With
/// `ρ = L` and constant schedules this is the constant-step bound curve.
fn bound_series(config: &ExperimentConfig, schedule: &ScheduleConfig, gap: f64) -> Result<Option<(Vec<f64>, Option<f64>)>> {
    if config.solver.algorithm != Algorithm::Ipgm || config.solver.step_scale != 0.5 {
        return Ok(None);
    }
    let ScheduleConfig {
        lipschitz: l,
        rho,
        degree: q,
        delta0: delta,
        beta,
        zeta,
        max_iters,
        ..
    } = *schedule;
    let constant = beta == 0.0 && zeta == 0.0;
    let series = (0..max_iters)
        .map(|k| {
            if constant && rho == l {
                bound_cor1_const(l, q, delta, gap, k as f64)
            } else {
                bound_thm2(l, rho, q, delta, beta, zeta, gap, k as f64)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let limit = match (constant, rho == l) {
        (true, true) => Some(cor1_plateau(l, q, delta)?),
        (true, false) => Some(bound_thm2(l, rho, q, delta, 0.0, 0.0, 0.0, 0.0)?),
        _ => None,
    };
    Ok(Some((series, limit)))
}

fn solve(
    config: &ExperimentConfig,
    oracle: &dyn InexactOracle,
    h: &ProxFunction,
    schedule: &ScheduleConfig,
    x0: &[f64],
    seed: u64,
) -> Result<RunTrace> {
    let s = &config.solver;
    match s.algorithm {
        Algorithm::Ipgm if config.worst_case_directions > 0 => {
            ipgm_worst_case_run(oracle, h, schedule, x0, seed, config.worst_case_directions)
        }
        Algorithm::Ipgm => ipgm_run(oracle, h, schedule, x0, seed),
        Algorithm::IpgmAdaptive => ipgm_adaptive_run(oracle, h, schedule, x0, s.epsilon0, seed).map(|r| r.trace),
        Algorithm::Fipgm => fipgm_run(oracle, h, schedule, x0, s.theta_rule, seed),
    }
}

/// Runs one cell. Solver failures are reported in the summary; only setup
/// errors are returned as `Err`.
pub fn run_cell(config: &ExperimentConfig, instance: &Instance, cell: &Cell) -> Result<CellRun> {
    let oracle = instance.oracle(&config.oracle, cell.degree, cell.noise_bound)?;
    let h = instance.prox()?;
    let x0 = instance.start();
    let schedule = schedule_for(config, instance, cell);
    let gap = instance.objective().value(&x0) + h.value(&x0) - instance.lower_bound();
    let bounds = bound_series(config, &schedule, gap.max(0.0))?;
    let mut summary = CellSummary {
        cell: *cell,
        delta_eff: schedule.delta0,
        status: CellStatus::Ok,
        message: None,
        final_min_gm_sq: None,
        plateau: None,
        bound_plateau: bounds.as_ref().and_then(|b| b.1),
        dominated: None,
    };
    match solve(config, oracle.as_ref(), &h, &schedule, &x0, cell.seed) {
        Ok(trace) => {
            let min_gm = trace.min_gm_sq();
            summary.final_min_gm_sq = min_gm.last().copied();
            summary.plateau = plateau(&min_gm, config.plateau_fraction);
            summary.dominated = bounds
                .as_ref()
                .map(|(b, _)| min_gm.iter().zip(b).all(|(m, b)| m <= b));
            Ok(CellRun {
                summary,
                trace: Some(trace),
                bounds: bounds.map(|b| b.0),
            })
        }
        Err(e) => {
            summary.status = match e {
                Error::Diverged { .. } | Error::NonFinite { .. } => CellStatus::Diverged,
                _ => CellStatus::Failed,
            };
            summary.message = Some(e.to_string());
            Ok(CellRun {
                summary,
                trace: None,
                bounds: None,
            })
        }
    }
}

/// Per-`(q, Δ)` aggregate over repeats.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlateauRow {
    pub degree: f64,
    pub noise_bound: f64,
    pub delta_eff: f64,
    pub median_plateau: Option<f64>,
    pub bound_plateau: Option<f64>,
    pub all_dominated: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub output_dir: PathBuf,
    pub cells: Vec<CellSummary>,
    pub plateaus: Vec<PlateauRow>,
}

impl ExperimentReport {
    pub fn any_diverged(&self) -> bool {
        self.cells.iter().any(|c| c.status != CellStatus::Ok)
    }

    pub fn plateau_for(&self, degree: f64, noise_bound: f64) -> Option<&PlateauRow> {
        self.plateaus
            .iter()
            .find(|p| p.degree == degree && p.noise_bound == noise_bound)
    }

    pub fn summary_csv(&self) -> String {
        let mut s = format!("{SUMMARY_CSV_HEADER}\n");
        for c in &self.cells {
            let _ = writeln!(
                s,
                "{},{},{:e},{},{},{},{},{},{},{}",
                c.cell.degree,
                c.cell.noise_bound,
                c.delta_eff,
                c.cell.repeat,
                c.cell.seed,
                c.status.name(),
                opt(c.final_min_gm_sq),
                opt(c.plateau),
                opt(c.bound_plateau),
                opt_bool(c.dominated),
            );
        }
        s
    }

    pub fn plateau_csv(&self) -> String {
        let mut s = format!("{PLATEAU_CSV_HEADER}\n");
        for p in &self.plateaus {
            let _ = writeln!(
                s,
                "{},{},{:e},{},{},{}",
                p.degree,
                p.noise_bound,
                p.delta_eff,
                opt(p.median_plateau),
                opt(p.bound_plateau),
                opt_bool(p.all_dominated),
            );
        }
        s
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| format!("{v:e}")).unwrap_or_default()
}

fn opt_bool(v: Option<bool>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn aggregate(config: &ExperimentConfig, cells: &[CellSummary]) -> Vec<PlateauRow> {
    let mut rows = Vec::new();
    for noise_bound in config.noise_grid() {
        for &degree in &config.oracle.degrees {
            let group: Vec<&CellSummary> = cells
                .iter()
                .filter(|c| c.cell.degree == degree && c.cell.noise_bound == noise_bound)
                .collect();
            let Some(first) = group.first() else { continue };
            let mut plateaus: Vec<f64> = group.iter().filter_map(|c| c.plateau).collect();
            let median_plateau = if plateaus.len() == group.len() {
                median(&mut plateaus)
            } else {
                None
            };
            let all_dominated = group
                .iter()
                .map(|c| c.dominated)
                .try_fold(true, |acc, d| d.map(|d| acc && d));
            rows.push(PlateauRow {
                degree,
                noise_bound,
                delta_eff: first.delta_eff,
                median_plateau,
                bound_plateau: first.bound_plateau,
                all_dominated,
            });
        }
    }
    rows
}

/// Worker count from [`WORKERS_ENV`], or rayon's default when unset or invalid.
pub fn worker_count() -> Option<usize> {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

fn pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = worker_count() {
        b = b.num_threads(n);
    }
    b.build().map_err(|e| Error::Config(format!("thread pool: {e}")))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents)?;
    Ok(())
}

/// Runs the whole grid and writes:
///
/// * `cells/<stem>.csv`: the trace, with a `bound` column when one applies;
/// * `bounds/q<q>_delta<Δ>.csv`: the sampled bound curve;
/// * `summary.csv` and `plateaus.csv`;
/// * `config.json`: the resolved configuration.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let instance = Instance::build(&config.problem)?;
    sweep(config, |cell| run_cell(config, &instance, cell))
}

fn sweep(config: &ExperimentConfig, runner: impl Fn(&Cell) -> Result<CellRun> + Sync) -> Result<ExperimentReport> {
    let dir = &config.output.dir;
    let cells_dir = dir.join("cells");
    let bounds_dir = dir.join("bounds");
    std::fs::create_dir_all(&cells_dir)?;
    std::fs::create_dir_all(&bounds_dir)?;
    write(&dir.join("config.json"), &config.to_json())?;

    let cells = grid(config);
    let results: Vec<Result<CellSummary>> = pool()?.install(|| {
        cells
            .par_iter()
            .map(|cell| {
                let run = runner(cell)?;
                let stem = cell.file_stem();
                if let Some(trace) = &run.trace {
                    write(&cells_dir.join(format!("{stem}.csv")), &trace.to_csv(run.bounds.as_deref()))?;
                }
                if let (Some(b), 0) = (&run.bounds, cell.repeat) {
                    let curve = BoundCurve {
                        kind: CurveKind::Cor1Const,
                        parameters: Default::default(),
                        samples: b.iter().enumerate().map(|(k, v)| (k as f64, *v)).collect(),
                    };
                    let name = format!("q{}_delta{}.csv", cell.degree, cell.noise_bound);
                    write(&bounds_dir.join(name), &curve.to_csv())?;
                }
                Ok(run.summary)
            })
            .collect()
    });
    let summaries = results.into_iter().collect::<Result<Vec<_>>>()?;
    let report = ExperimentReport {
        output_dir: dir.clone(),
        plateaus: aggregate(config, &summaries),
        cells: summaries,
    };
    write(&dir.join("summary.csv"), &report.summary_csv())?;
    write(&dir.join("plateaus.csv"), &report.plateau_csv())?;
    Ok(report)
}

/// [`run_experiment`] with the adversarial oracle mode switched on.
pub fn run_worst_case(config: &ExperimentConfig) -> Result<ExperimentReport> {
    if config.worst_case_directions == 0 {
        return Err(Error::Config("worst_case_directions must be >= 1".into()));
    }
    run_experiment(config)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificationRow {
    pub degree: f64,
    pub noise_bound: f64,
    pub delta_claimed: f64,
    pub report: CertificationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificationSummary {
    pub rows: Vec<CertificationRow>,
    pub all_certified: bool,
}

/// Certifies every `(Δ, q)` oracle of the grid and writes `certification.json`.
pub fn certify_command(config: &ExperimentConfig) -> Result<CertificationSummary> {
    config.validate()?;
    let instance = Instance::build(&config.problem)?;
    let sampler = instance.sampler();
    let mut rows = Vec::new();
    for noise_bound in config.noise_grid() {
        for &degree in &config.oracle.degrees {
            let oracle = instance.oracle(&config.oracle, degree, noise_bound)?;
            let seed = derive_seed(config.master_seed, &[noise_bound.to_bits(), degree.to_bits()]);
            let report = certify_oracle(
                oracle.as_ref(),
                instance.objective(),
                sampler.as_ref(),
                config.certify.pairs,
                config.certify.tolerance,
                seed,
            )?;
            rows.push(CertificationRow {
                degree,
                noise_bound,
                delta_claimed: oracle.accuracy() * config.oracle.claim_scale,
                report,
            });
        }
    }
    let summary = CertificationSummary {
        all_certified: rows.iter().all(|r| r.report.certified),
        rows,
    };
    std::fs::create_dir_all(&config.output.dir)?;
    write(&config.output.dir.join("certification.json"), &serde_json::to_string_pretty(&summary)?)?;
    Ok(summary)
}

/// Samples a rate curve at the given horizons.
pub fn rates_command(kind: CurveKind, params: &CurveParams, ks: &[f64]) -> Result<BoundCurve> {
    if let Some(&k) = ks.first() {
        evaluate_curve(kind, params, k)?;
    }
    BoundCurve::sample(kind, params, ks)
}

/// Preset grid: `q ∈ {0, ½, 1}`, `Δ ∈ {0.1, 1, 3}`, 5000 iterations, 5 seeds
/// on the default LogSum instance (`n = 64`, `N = 128`, `R = 4`, seed 0).
pub fn fig1_config(output_dir: impl Into<PathBuf>, master_seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        version: CONFIG_VERSION,
        master_seed,
        problem: ProblemSpec::LogSum {
            n: 64,
            big_n: 128,
            radius: 4.0,
            seed: 0,
            noise_level: crate::problems::DEFAULT_NOISE_LEVEL,
        },
        oracle: OracleSpec {
            family: OracleKind::NoisyGradient,
            noise_bounds: vec![0.1, 1.0, 3.0],
            degrees: vec![0.0, 0.5, 1.0],
            claim_scale: 1.0,
        },
        solver: SolverSpec {
            algorithm: Algorithm::Ipgm,
            iterations: 5000,
            step_scale: 0.5,
            rho: None,
            beta: 0.0,
            zeta: 0.0,
            theta_rule: Default::default(),
            epsilon0: 1.0,
        },
        output: OutputSpec { dir: output_dir.into() },
        repeats: 5,
        worst_case_directions: 0,
        plateau_fraction: 0.1,
        certify: CertifySpec::default(),
    }
}

pub fn reproduce_fig1(output_dir: impl Into<PathBuf>, master_seed: u64) -> Result<ExperimentReport> {
    run_experiment(&fig1_config(output_dir, master_seed))
}
