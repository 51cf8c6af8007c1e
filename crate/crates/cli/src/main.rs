//! `graphmm` command line.
//!
//! Exit status: 0 on success, 1 on I/O or data errors, 2 on usage errors and
//! 3 when a solve stopped at `max_iters` without meeting the stopping test.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use graphmm::bench::{
    emit_plot_data, generate_graph, run_montecarlo, run_single, tune_alpha_beta, ExperimentSpec, LabelledTrace,
    ProblemSource,
};
use graphmm::data_gen::{gen_signals, SignalModel};
use graphmm::io::{read_trace, save_edge_list, write_data_matrix};

const EXIT_IO: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;

#[derive(Parser)]
#[command(name = "graphmm", version, about = "Learn sparse graphs from smooth signals by majorization-minimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a ground-truth graph and signals on it
    Gen(ExperimentArgs),
    /// Solve one instance and write its trace and learned edge list
    Solve(ExperimentArgs),
    /// Monte-Carlo benchmark over seeded instances
    Bench(ExperimentArgs),
    /// Merge experiment traces into one long-format CSV
    Plotdata(PlotArgs),
    /// Grid search over alpha and beta for best edge recovery
    Tune(TuneArgs),
}

/// Flags mirror the `key = value` config keys; flags override `--config`.
#[derive(Args, Clone, Default)]
struct ExperimentArgs {
    /// Config file with `key = value` lines
    #[arg(long)]
    config: Option<PathBuf>,
    /// Ground-truth family: er, sbm or file
    #[arg(long)]
    family: Option<String>,
    /// Edge-list file with the ground-truth graph
    #[arg(long)]
    graph: Option<PathBuf>,
    /// CSV data matrix (one node per row) instead of synthetic signals
    #[arg(long)]
    data: Option<PathBuf>,
    /// Skip one header row of the data matrix
    #[arg(long)]
    skip_header: bool,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    prob_edge: Option<f64>,
    #[arg(long)]
    p_in: Option<f64>,
    #[arg(long)]
    p_out: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// mm or pg-oracle
    #[arg(long)]
    solver: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    elim_threshold: Option<f64>,
    #[arg(long)]
    elim_enabled: Option<bool>,
    #[arg(long)]
    oracle_tol: Option<f64>,
    #[arg(long)]
    oracle_max_iters: Option<usize>,
    /// Comma-separated distances replacing the computed ones
    #[arg(long)]
    d_override: Option<String>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    /// Experiment directories written by `solve` or `bench`
    #[arg(required = true)]
    dirs: Vec<PathBuf>,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TuneArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    /// Comma-separated alpha grid
    #[arg(long, value_delimiter = ',', default_value = "0.1,1,10,100")]
    alphas: Vec<f64>,
    /// Comma-separated beta grid
    #[arg(long, value_delimiter = ',', default_value = "0.1,1,10,100")]
    betas: Vec<f64>,
}

/// Error that maps to the usage exit status.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

impl ExperimentArgs {
    fn settings(&self) -> Vec<(&'static str, String)> {
        let mut kv: Vec<(&'static str, String)> = Vec::new();
        let mut push = |k: &'static str, v: Option<String>| {
            if let Some(v) = v {
                kv.push((k, v));
            }
        };
        // family and source first: they reset family-specific settings
        push("family", self.family.clone());
        push("graph", self.graph.as_ref().map(|p| p.display().to_string()));
        push("data", self.data.as_ref().map(|p| p.display().to_string()));
        push("skip_header", self.skip_header.then(|| "true".to_string()));
        push("p", self.p.map(|v| v.to_string()));
        push("prob_edge", self.prob_edge.map(|v| v.to_string()));
        push("p_in", self.p_in.map(|v| v.to_string()));
        push("p_out", self.p_out.map(|v| v.to_string()));
        push("n", self.n.map(|v| v.to_string()));
        push("sigma", self.sigma.map(|v| v.to_string()));
        push("alpha", self.alpha.map(|v| v.to_string()));
        push("beta", self.beta.map(|v| v.to_string()));
        push("solver", self.solver.clone());
        push("epsilon", self.epsilon.map(|v| v.to_string()));
        push("max_iters", self.max_iters.map(|v| v.to_string()));
        push("elim_threshold", self.elim_threshold.map(|v| v.to_string()));
        push("elim_enabled", self.elim_enabled.map(|v| v.to_string()));
        push("oracle_tol", self.oracle_tol.map(|v| v.to_string()));
        push("oracle_max_iters", self.oracle_max_iters.map(|v| v.to_string()));
        push("d_override", self.d_override.clone());
        push("runs", self.runs.map(|v| v.to_string()));
        push("seed", self.seed.map(|v| v.to_string()));
        push("out", self.out.as_ref().map(|p| p.display().to_string()));
        kv
    }

    fn spec(&self) -> Result<ExperimentSpec> {
        let mut spec = ExperimentSpec::default();
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            spec.apply_config_str(&text, path).map_err(|e| usage(e.to_string()))?;
        }
        for (key, value) in self.settings() {
            spec.set(key, &value).map_err(|e| usage(format!("--{}: {e}", key.replace('_', "-"))))?;
        }
        spec.validate().map_err(|e| usage(e.to_string()))?;
        Ok(spec)
    }
}

fn cmd_gen(args: &ExperimentArgs) -> Result<u8> {
    let spec = args.spec()?;
    let ProblemSource::Synthetic { graph, p, n, sigma } = &spec.source else {
        return Err(usage("gen needs a synthetic graph family, not --data"));
    };
    let out = spec.out_dir.clone().ok_or_else(|| usage("gen needs --out"))?;
    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let seed = spec.run_seed(0);
    let g = generate_graph(graph, *p, seed)?;
    let x = gen_signals(&g, &SignalModel { sigma: *sigma, n: *n }, seed)?;
    save_edge_list(&g.w_true, g.p, &out.join("graph.csv"))?;
    let path = out.join("signals.csv");
    let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    write_data_matrix(&x, &mut w).and_then(|_| w.flush()).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {} ({} edges) and {}", out.join("graph.csv").display(), g.edge_count(), path.display());
    Ok(0)
}

fn cmd_solve(args: &ExperimentArgs) -> Result<u8> {
    let spec = args.spec()?;
    let outcome = run_single(&spec)?;
    let r = &outcome.result;
    println!(
        "solver={} p={} iters={} converged={} f={:?} edges={} time={:.6}s",
        spec.solver.label(),
        outcome.p,
        r.iters,
        r.converged,
        r.f_star,
        r.w_star.values().iter().filter(|&&w| w > 0.0).count(),
        outcome.solve_time().as_secs_f64()
    );
    if let Some(rec) = outcome.recovery {
        println!("precision={:.4} recall={:.4} f1={:.4}", rec.precision(), rec.recall(), rec.f1());
    }
    Ok(if r.converged { 0 } else { EXIT_NOT_CONVERGED })
}

fn cmd_bench(args: &ExperimentArgs) -> Result<u8> {
    if args.seed.is_none() {
        return Err(usage("bench requires --seed"));
    }
    let spec = args.spec()?;
    let s = run_montecarlo(&spec)?;
    s.write_summary_csv(io::stdout().lock())?;
    println!("mean solve time {:.6}s", s.mean_wall_time.as_secs_f64());
    Ok(if s.all_converged() { 0 } else { EXIT_NOT_CONVERGED })
}

fn trace_files(dir: &Path) -> Result<Vec<(usize, PathBuf)>> {
    let mut found = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let path = entry?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
        if let Some(run) = name.strip_prefix("trace_run").and_then(|r| r.strip_suffix(".csv")) {
            if let Ok(run) = run.parse::<usize>() {
                found.push((run, path));
            }
        }
    }
    found.sort();
    Ok(found)
}

fn cmd_plotdata(args: &PlotArgs) -> Result<u8> {
    let mut loaded = Vec::new();
    for dir in &args.dirs {
        let echo = dir.join("spec.echo");
        let text = fs::read_to_string(&echo).with_context(|| format!("reading {}", echo.display()))?;
        let spec = ExperimentSpec::from_config_str(&text, &echo)?;
        let files = trace_files(dir)?;
        if files.is_empty() {
            bail!("{}: no trace_run<k>.csv files", dir.display());
        }
        for (run, path) in files {
            loaded.push((spec.solver.label(), run, read_trace(&path)?));
        }
    }
    let traces: Vec<LabelledTrace<'_>> = loaded
        .iter()
        .map(|(solver, run, trace)| LabelledTrace { solver, run: *run, trace })
        .collect();
    match &args.out {
        Some(path) => {
            let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            emit_plot_data(&traces, &mut w)?;
            w.flush()?;
        }
        None => emit_plot_data(&traces, io::stdout().lock())?,
    }
    Ok(0)
}

fn cmd_tune(args: &TuneArgs) -> Result<u8> {
    let spec = args.experiment.spec()?;
    let points = tune_alpha_beta(&spec, &args.alphas, &args.betas, spec.monte_carlo_runs)?;
    println!("alpha,beta,mean_f1,mean_iters");
    for t in points {
        println!("{:?},{:?},{:.4},{:.2}", t.alpha, t.beta, t.mean_f1, t.mean_iters);
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Plotdata(a) => cmd_plotdata(a),
        Command::Tune(a) => cmd_tune(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.downcast_ref::<Usage>().is_some() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::from(EXIT_IO)
            }
        }
    }
}
