//! Experiment runner: problem generation or loading, one solve per run,
//! Monte-Carlo aggregation and the CSV files of an experiment directory.
//!
//! An experiment directory holds
//!
//! | file | contents |
//! |------|----------|
//! | `spec.echo` | the experiment in `key = value` form, loadable with [`ExperimentSpec::from_config_str`] |
//! | `trace_run<k>.csv` | `iter,f,active_count` for run `k` |
//! | `edges_run<k>.csv` | learned edge list `i,j,weight` for run `k` |
//! | `runs.csv` | one row per run |
//! | `summary.csv` | aggregate over all runs |
//! | `timing.csv` | solver wall time per run |
//!
//! Everything except `timing.csv` is a deterministic function of the spec.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use rayon::prelude::*;

use crate::baseline_oracle::{pg_solve, OracleConfig};
use crate::data_gen::{assemble, gen_er, gen_sbm, gen_signals, GraphFamily, GroundTruthGraph, RngSeed, SignalModel};
use crate::graph_model::{edge_count, DistanceVector, ProblemInstance, WeightVector};
use crate::io::{read_data_matrix, read_edge_list, save_edge_list};
use crate::mm_solver::{solve, SolverConfig};
use crate::trace::{ConvergenceTrace, SolveResult};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum GraphSpec {
    Er { prob_edge: f64 },
    Sbm { p_in: f64, p_out: f64 },
    /// Ground truth read from an edge-list file.
    File { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSource {
    /// Ground truth graph plus Gaussian smooth signals drawn on it.
    Synthetic { graph: GraphSpec, p: usize, n: usize, sigma: f64 },
    /// Signals read from a CSV data matrix.
    Data { path: PathBuf, skip_header: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Mm,
    PgOracle,
}

impl SolverKind {
    pub fn label(self) -> &'static str {
        match self {
            SolverKind::Mm => "mm",
            SolverKind::PgOracle => "pg-oracle",
        }
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mm" => Ok(SolverKind::Mm),
            "pg" | "pg-oracle" => Ok(SolverKind::PgOracle),
            _ => Err(Error::InvalidArgument(format!("unknown solver {s:?} (expected mm or pg-oracle)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub source: ProblemSource,
    pub alpha: f64,
    pub beta: f64,
    pub solver: SolverKind,
    pub solver_config: SolverConfig,
    pub oracle_config: OracleConfig,
    pub monte_carlo_runs: usize,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    /// Replaces the computed distance vector when set.
    pub distance_override: Option<Vec<f64>>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            source: ProblemSource::Synthetic {
                graph: GraphSpec::Er { prob_edge: 0.1 },
                p: 100,
                n: 1200,
                sigma: 0.1,
            },
            alpha: 1.0,
            beta: 1.0,
            solver: SolverKind::Mm,
            solver_config: SolverConfig::default(),
            oracle_config: OracleConfig::default(),
            monte_carlo_runs: 1,
            seed: 0,
            out_dir: None,
            distance_override: None,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad value for {key}: {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(Error::InvalidArgument(format!("bad boolean for {key}: {value:?}"))),
    }
}

impl ExperimentSpec {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let (key, value) = (key.trim(), value.trim());
        match key {
            "family" => {
                let (p, n, sigma) = match &self.source {
                    ProblemSource::Synthetic { p, n, sigma, .. } => (*p, *n, *sigma),
                    ProblemSource::Data { .. } => (100, 1200, 0.1),
                };
                let graph = match value {
                    "er" => GraphSpec::Er { prob_edge: 0.1 },
                    "sbm" => GraphSpec::Sbm { p_in: 0.3, p_out: 0.05 },
                    "file" => GraphSpec::File { path: PathBuf::new() },
                    _ => return Err(Error::InvalidArgument(format!("unknown graph family {value:?}"))),
                };
                self.source = ProblemSource::Synthetic { graph, p, n, sigma };
            }
            "p" | "n" | "sigma" => {
                let ProblemSource::Synthetic { p, n, sigma, .. } = &mut self.source else {
                    return Err(Error::InvalidArgument(format!("{key} applies to synthetic problems only")));
                };
                match key {
                    "p" => *p = parse_value(key, value)?,
                    "n" => *n = parse_value(key, value)?,
                    _ => *sigma = parse_value(key, value)?,
                }
            }
            "prob_edge" => match &mut self.source {
                ProblemSource::Synthetic { graph: GraphSpec::Er { prob_edge }, .. } => *prob_edge = parse_value(key, value)?,
                _ => return Err(Error::InvalidArgument("prob_edge requires family = er".into())),
            },
            "p_in" | "p_out" => match &mut self.source {
                ProblemSource::Synthetic { graph: GraphSpec::Sbm { p_in, p_out }, .. } => {
                    let v = parse_value(key, value)?;
                    if key == "p_in" { *p_in = v } else { *p_out = v }
                }
                _ => return Err(Error::InvalidArgument(format!("{key} requires family = sbm"))),
            },
            "graph" => match &mut self.source {
                ProblemSource::Synthetic { graph, .. } => *graph = GraphSpec::File { path: value.into() },
                ProblemSource::Data { .. } => return Err(Error::InvalidArgument("graph conflicts with data".into())),
            },
            "data" => {
                let skip_header = matches!(self.source, ProblemSource::Data { skip_header: true, .. });
                self.source = ProblemSource::Data { path: value.into(), skip_header };
            }
            "skip_header" => match &mut self.source {
                ProblemSource::Data { skip_header, .. } => *skip_header = parse_bool(key, value)?,
                _ => return Err(Error::InvalidArgument("skip_header requires data".into())),
            },
            "alpha" => self.alpha = parse_value(key, value)?,
            "beta" => self.beta = parse_value(key, value)?,
            "solver" => self.solver = value.parse()?,
            "epsilon" => self.solver_config.epsilon = parse_value(key, value)?,
            "max_iters" => self.solver_config.max_iters = parse_value(key, value)?,
            "elim_threshold" => self.solver_config.elimination_threshold = parse_value(key, value)?,
            "elim_enabled" => self.solver_config.elimination_enabled = parse_bool(key, value)?,
            "oracle_tol" => self.oracle_config.tol = parse_value(key, value)?,
            "oracle_max_iters" => self.oracle_config.max_iters = parse_value(key, value)?,
            "oracle_step" => self.oracle_config.initial_step = parse_value(key, value)?,
            "oracle_backtrack" => self.oracle_config.backtrack_factor = parse_value(key, value)?,
            "runs" => self.monte_carlo_runs = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            "out" => self.out_dir = Some(value.into()),
            "d_override" => {
                let d = value
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .map(|s| parse_value(key, s))
                    .collect::<Result<Vec<f64>>>()?;
                self.distance_override = Some(d);
            }
            other => return Err(Error::InvalidArgument(format!("unknown setting {other:?}"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines; blank lines and `#` comments are skipped.
    pub fn apply_config_str(&mut self, text: &str, origin: &Path) -> Result<()> {
        for (k, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse = |msg: String| Error::Parse { path: origin.to_path_buf(), line: k + 1, msg };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse(format!("expected key = value, found {line:?}")))?;
            self.set(key, value).map_err(|e| parse(e.to_string()))?;
        }
        Ok(())
    }

    pub fn from_config_str(text: &str, origin: &Path) -> Result<Self> {
        let mut spec = Self::default();
        spec.apply_config_str(text, origin)?;
        Ok(spec)
    }

    /// `key = value` rendering accepted by [`ExperimentSpec::from_config_str`].
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        match &self.source {
            ProblemSource::Synthetic { graph, p, n, sigma } => {
                match graph {
                    GraphSpec::Er { prob_edge } => {
                        let _ = writeln!(s, "family = er\nprob_edge = {prob_edge:?}");
                    }
                    GraphSpec::Sbm { p_in, p_out } => {
                        let _ = writeln!(s, "family = sbm\np_in = {p_in:?}\np_out = {p_out:?}");
                    }
                    GraphSpec::File { path } => {
                        let _ = writeln!(s, "family = file\ngraph = {}", path.display());
                    }
                }
                let _ = writeln!(s, "p = {p}\nn = {n}\nsigma = {sigma:?}");
            }
            ProblemSource::Data { path, skip_header } => {
                let _ = writeln!(s, "data = {}\nskip_header = {skip_header}", path.display());
            }
        }
        let c = &self.solver_config;
        let o = &self.oracle_config;
        let _ = writeln!(s, "alpha = {:?}\nbeta = {:?}\nsolver = {}", self.alpha, self.beta, self.solver.label());
        let _ = writeln!(
            s,
            "epsilon = {:?}\nmax_iters = {}\nelim_threshold = {:?}\nelim_enabled = {}",
            c.epsilon, c.max_iters, c.elimination_threshold, c.elimination_enabled
        );
        let _ = writeln!(
            s,
            "oracle_tol = {:?}\noracle_max_iters = {}\noracle_step = {:?}\noracle_backtrack = {:?}",
            o.tol, o.max_iters, o.initial_step, o.backtrack_factor
        );
        let _ = writeln!(s, "runs = {}\nseed = {}", self.monte_carlo_runs, self.seed);
        if let Some(d) = &self.distance_override {
            let parts: Vec<String> = d.iter().map(|v| format!("{v:?}")).collect();
            let _ = writeln!(s, "d_override = {}", parts.join(","));
        }
        s
    }

    pub fn validate(&self) -> Result<()> {
        if self.monte_carlo_runs == 0 {
            return Err(Error::InvalidArgument("runs must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.beta > 0.0) {
            return Err(Error::InvalidArgument("alpha and beta must be positive".into()));
        }
        self.solver_config.validate()?;
        self.oracle_config.validate()?;
        match &self.source {
            ProblemSource::Synthetic { graph, n, sigma, .. } => {
                SignalModel { sigma: *sigma, n: *n }.validate()?;
                if let GraphSpec::File { path } = graph {
                    if !path.is_file() {
                        return Err(Error::InvalidArgument(format!("graph file {} does not exist", path.display())));
                    }
                }
            }
            ProblemSource::Data { path, .. } => {
                if !path.is_file() {
                    return Err(Error::InvalidArgument(format!("data file {} does not exist", path.display())));
                }
            }
        }
        Ok(())
    }

    /// Seed of run `k`.
    pub fn run_seed(&self, run: usize) -> RngSeed {
        RngSeed(self.seed.wrapping_add(run as u64))
    }
}

/// A generated or loaded problem and, when known, its ground truth.
#[derive(Debug, Clone)]
pub struct PreparedProblem {
    pub problem: ProblemInstance,
    pub truth: Option<GroundTruthGraph>,
}

pub fn generate_graph(graph: &GraphSpec, p: usize, seed: RngSeed) -> Result<GroundTruthGraph> {
    match graph {
        GraphSpec::Er { prob_edge } => gen_er(p, *prob_edge, seed),
        GraphSpec::Sbm { p_in, p_out } => gen_sbm(p, *p_in, *p_out, seed),
        GraphSpec::File { path } => {
            let (nodes, w) = read_edge_list(path, None)?;
            GroundTruthGraph::new(nodes, w, GraphFamily::Loaded)
        }
    }
}

pub fn prepare(spec: &ExperimentSpec, run: usize) -> Result<PreparedProblem> {
    let seed = spec.run_seed(run);
    let (x, truth) = match &spec.source {
        ProblemSource::Synthetic { graph, p, n, sigma } => {
            let g = generate_graph(graph, *p, seed)?;
            let x = gen_signals(&g, &SignalModel { sigma: *sigma, n: *n }, seed)?;
            (x, Some(g))
        }
        ProblemSource::Data { path, skip_header } => (read_data_matrix(path, *skip_header)?, None),
    };
    let mut problem = assemble(&x, spec.alpha, spec.beta)?;
    if let Some(d) = &spec.distance_override {
        let p = problem.nodes();
        if d.len() != edge_count(p) {
            return Err(Error::InvalidArgument(format!(
                "distance override has {} entries, expected {}",
                d.len(),
                edge_count(p)
            )));
        }
        problem = ProblemInstance::from_distances(p, DistanceVector::new(d.clone())?, spec.alpha, spec.beta)?;
    }
    Ok(PreparedProblem { problem, truth })
}

pub fn run_solver(spec: &ExperimentSpec, problem: &ProblemInstance) -> Result<SolveResult> {
    match spec.solver {
        SolverKind::Mm => solve(problem, &spec.solver_config),
        SolverKind::PgOracle => pg_solve(problem, &spec.oracle_config),
    }
}

/// Precision / recall of the learned support against a ground truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeRecovery {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
}

impl EdgeRecovery {
    pub fn precision(&self) -> f64 {
        let predicted = self.true_positives + self.false_positives;
        if predicted == 0 { 0.0 } else { self.true_positives as f64 / predicted as f64 }
    }

    pub fn recall(&self) -> f64 {
        let actual = self.true_positives + self.false_negatives;
        if actual == 0 { 0.0 } else { self.true_positives as f64 / actual as f64 }
    }

    pub fn f1(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) }
    }
}

/// Learned weights below this fraction of the largest learned weight do not
/// count as edges when scoring recovery.
pub const RECOVERY_RELATIVE_THRESHOLD: f64 = 1e-2;

pub fn edge_recovery(learned: &WeightVector, truth: &WeightVector) -> EdgeRecovery {
    let max = learned.values().iter().copied().fold(0.0, f64::max);
    let cut = RECOVERY_RELATIVE_THRESHOLD * max;
    let mut r = EdgeRecovery { true_positives: 0, false_positives: 0, false_negatives: 0 };
    for (&w, &t) in learned.values().iter().zip(truth.values()) {
        match (w > cut && w > 0.0, t > 0.0) {
            (true, true) => r.true_positives += 1,
            (true, false) => r.false_positives += 1,
            (false, true) => r.false_negatives += 1,
            (false, false) => {}
        }
    }
    r
}

/// One finished run of an experiment.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub run: usize,
    pub seed: u64,
    pub p: usize,
    pub result: SolveResult,
    pub recovery: Option<EdgeRecovery>,
}

impl RunOutcome {
    pub fn solve_time(&self) -> Duration {
        self.result.trace.total_time()
    }

    pub fn time_per_iter(&self) -> Duration {
        self.solve_time() / self.result.iters.max(1) as u32
    }
}

fn execute_run(spec: &ExperimentSpec, run: usize) -> Result<RunOutcome> {
    let prepared = prepare(spec, run)?;
    let result = run_solver(spec, &prepared.problem)?;
    let recovery = prepared.truth.as_ref().map(|g| edge_recovery(&result.w_star, &g.w_true));
    Ok(RunOutcome {
        run,
        seed: spec.run_seed(run).0,
        p: prepared.problem.nodes(),
        result,
        recovery,
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?))
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let mut out = create(path)?;
    f(&mut out).and_then(|_| out.flush()).map_err(|e| Error::io(path, e))
}

fn prepare_out_dir(spec: &ExperimentSpec) -> Result<Option<PathBuf>> {
    let Some(dir) = &spec.out_dir else { return Ok(None) };
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let echo = spec.to_config_string();
    write_file(&dir.join("spec.echo"), |out| out.write_all(echo.as_bytes()))?;
    Ok(Some(dir.clone()))
}

fn write_run_files(dir: &Path, outcome: &RunOutcome) -> Result<()> {
    let k = outcome.run;
    write_file(&dir.join(format!("trace_run{k}.csv")), |out| outcome.result.trace.write_csv(out))?;
    save_edge_list(&outcome.result.w_star, outcome.p, &dir.join(format!("edges_run{k}.csv")))
}

/// Runs run 0 of the experiment and writes its files.
pub fn run_single(spec: &ExperimentSpec) -> Result<RunOutcome> {
    spec.validate()?;
    let dir = prepare_out_dir(spec)?;
    let outcome = execute_run(spec, 0)?;
    if let Some(dir) = dir {
        write_run_files(&dir, &outcome)?;
    }
    Ok(outcome)
}

#[derive(Debug, Clone)]
pub struct BenchSummary {
    pub solver: SolverKind,
    pub runs: usize,
    pub converged_runs: usize,
    pub mean_iters: f64,
    pub median_iters: f64,
    pub mean_f_star: f64,
    pub mean_f1: Option<f64>,
    pub mean_wall_time: Duration,
    pub outcomes: Vec<RunOutcome>,
}

impl BenchSummary {
    pub fn convergence_rate(&self) -> f64 {
        self.converged_runs as f64 / self.runs as f64
    }

    pub fn all_converged(&self) -> bool {
        self.converged_runs == self.runs
    }

    pub fn from_outcomes(solver: SolverKind, outcomes: Vec<RunOutcome>) -> Self {
        let runs = outcomes.len();
        let mut iters: Vec<f64> = outcomes.iter().map(|o| o.result.iters as f64).collect();
        iters.sort_by(f64::total_cmp);
        let median_iters = if runs == 0 {
            f64::NAN
        } else if runs % 2 == 1 {
            iters[runs / 2]
        } else {
            0.5 * (iters[runs / 2 - 1] + iters[runs / 2])
        };
        let mean = |xs: &mut dyn Iterator<Item = f64>| {
            let (s, c) = xs.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
            if c == 0 { f64::NAN } else { s / c as f64 }
        };
        let recoveries: Vec<f64> = outcomes.iter().filter_map(|o| o.recovery.map(|r| r.f1())).collect();
        let total_time: Duration = outcomes.iter().map(|o| o.solve_time()).sum();
        Self {
            solver,
            runs,
            converged_runs: outcomes.iter().filter(|o| o.result.converged).count(),
            mean_iters: mean(&mut outcomes.iter().map(|o| o.result.iters as f64)),
            median_iters,
            mean_f_star: mean(&mut outcomes.iter().map(|o| o.result.f_star)),
            mean_f1: (recoveries.len() == runs && runs > 0).then(|| mean(&mut recoveries.iter().copied())),
            mean_wall_time: if runs == 0 { Duration::ZERO } else { total_time / runs as u32 },
            outcomes,
        }
    }

    /// Deterministic aggregate row; wall time lives in `timing.csv`.
    pub fn write_summary_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "solver,runs,converged_runs,convergence_rate,mean_iters,median_iters,mean_f_star,mean_f1")?;
        let f1 = self.mean_f1.map_or(String::new(), |v| format!("{v:?}"));
        writeln!(
            out,
            "{},{},{},{:?},{:?},{:?},{:?},{}",
            self.solver.label(),
            self.runs,
            self.converged_runs,
            self.convergence_rate(),
            self.mean_iters,
            self.median_iters,
            self.mean_f_star,
            f1
        )
    }

    pub fn write_runs_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "run,seed,iters,converged,f_star,active_edges,f1")?;
        for o in &self.outcomes {
            let active = o.result.w_star.values().iter().filter(|&&w| w > 0.0).count();
            let f1 = o.recovery.map_or(String::new(), |r| format!("{:?}", r.f1()));
            writeln!(
                out,
                "{},{},{},{},{:?},{},{}",
                o.run, o.seed, o.result.iters, o.result.converged, o.result.f_star, active, f1
            )?;
        }
        Ok(())
    }

    pub fn write_timing_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "run,solve_seconds,seconds_per_iter")?;
        for o in &self.outcomes {
            writeln!(out, "{},{:?},{:?}", o.run, o.solve_time().as_secs_f64(), o.time_per_iter().as_secs_f64())?;
        }
        writeln!(out, "mean,{:?},", self.mean_wall_time.as_secs_f64())
    }
}

/// Runs every Monte-Carlo replicate (concurrently), then aggregates in run
/// order and writes the experiment directory.
pub fn run_montecarlo(spec: &ExperimentSpec) -> Result<BenchSummary> {
    spec.validate()?;
    let dir = prepare_out_dir(spec)?;
    let outcomes = (0..spec.monte_carlo_runs)
        .into_par_iter()
        .map(|run| execute_run(spec, run))
        .collect::<Result<Vec<_>>>()?;
    let summary = BenchSummary::from_outcomes(spec.solver, outcomes);
    if let Some(dir) = dir {
        for o in &summary.outcomes {
            write_run_files(&dir, o)?;
        }
        write_file(&dir.join("summary.csv"), |out| summary.write_summary_csv(out))?;
        write_file(&dir.join("runs.csv"), |out| summary.write_runs_csv(out))?;
        write_file(&dir.join("timing.csv"), |out| summary.write_timing_csv(out))?;
    }
    Ok(summary)
}

/// A labelled trace for [`emit_plot_data`].
#[derive(Debug, Clone, Copy)]
pub struct LabelledTrace<'a> {
    pub solver: &'a str,
    pub run: usize,
    pub trace: &'a ConvergenceTrace,
}

/// Long-format `solver,run,iter,f` rows for external plotting.
pub fn emit_plot_data<W: Write>(traces: &[LabelledTrace<'_>], mut out: W) -> Result<()> {
    if traces.is_empty() {
        return Err(Error::InvalidArgument("no traces to emit".into()));
    }
    let io = |e| Error::io("<plot data>", e);
    writeln!(out, "solver,run,iter,f").map_err(io)?;
    for t in traces {
        for r in t.trace.records() {
            writeln!(out, "{},{},{},{:?}", t.solver, t.run, r.iter, r.f).map_err(io)?;
        }
    }
    Ok(())
}

/// One cell of an (α, β) grid evaluated by [`tune_alpha_beta`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuningPoint {
    pub alpha: f64,
    pub beta: f64,
    pub mean_f1: f64,
    pub mean_iters: f64,
}

/// Scores every (α, β) pair by mean edge-recovery F1 over `runs` replicates
/// of `spec` and returns the grid with the best point first. Ties keep grid
/// order.
pub fn tune_alpha_beta(
    spec: &ExperimentSpec,
    alphas: &[f64],
    betas: &[f64],
    runs: usize,
) -> Result<Vec<TuningPoint>> {
    let mut points = Vec::with_capacity(alphas.len() * betas.len());
    for &alpha in alphas {
        for &beta in betas {
            let cell = ExperimentSpec {
                alpha,
                beta,
                monte_carlo_runs: runs,
                out_dir: None,
                ..spec.clone()
            };
            let s = run_montecarlo(&cell)?;
            let mean_f1 = s.mean_f1.ok_or_else(|| {
                Error::InvalidArgument("tuning needs a synthetic source with known ground truth".into())
            })?;
            points.push(TuningPoint { alpha, beta, mean_f1, mean_iters: s.mean_iters });
        }
    }
    points.sort_by(|a, b| b.mean_f1.total_cmp(&a.mean_f1));
    Ok(points)
}
