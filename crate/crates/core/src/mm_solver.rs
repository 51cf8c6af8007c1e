//! Majorization-minimization solver.
//!
//! At an iterate `wᵏ` with node degrees `δᵏ = Swᵏ`, Jensen's inequality bounds
//! every barrier term by a sum over the edges incident to that node:
//!
//! ```text
//! −log(sᵢᵀw) ≤ −Σⱼ (sᵢⱼwⱼᵏ/δᵢᵏ) · log((δᵢᵏ/wⱼᵏ) · wⱼ)
//! ```
//!
//! with equality at `w = wᵏ`. The resulting surrogate separates over edges and
//! edge `j = (a, b)` solves `2dⱼwⱼ + 2βwⱼ² − cⱼ = 0` with
//! `cⱼ = α wⱼᵏ (1/δₐᵏ + 1/δ_bᵏ)`. Its positive root is the next iterate.
//!
//! An edge with `cⱼ = 0` maps to zero and stays there, so weights that fall
//! below the elimination threshold are clamped to zero and dropped from the
//! working set.

use std::time::Instant;

use crate::graph_model::{EdgeIndexMap, ProblemInstance, WeightVector};
use crate::sum::CompensatedSum;
use crate::trace::{ConvergenceTrace, SolveResult, TraceRecord};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Relative objective change below which the solve stops.
    pub epsilon: f64,
    pub max_iters: usize,
    /// Weights below this value after an update are set to zero and retired.
    pub elimination_threshold: f64,
    pub elimination_enabled: bool,
    /// Rebuild the working set once it has halved. Iterates are unaffected.
    pub compaction: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-4,
            max_iters: 10_000,
            elimination_threshold: 1e-8,
            elimination_enabled: true,
            compaction: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be at least 1".into()));
        }
        if !(self.elimination_threshold >= 0.0 && self.elimination_threshold.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "elimination threshold must be nonnegative, got {}",
                self.elimination_threshold
            )));
        }
        Ok(())
    }
}

/// `cⱼ = α wⱼ (1/deg(a) + 1/deg(b))` for every edge `j = (a, b)`.
pub fn compute_c(w: &[f64], prob: &ProblemInstance) -> Result<Vec<f64>> {
    prob.check_weights(w)?;
    let map = prob.edge_map();
    let ends: Vec<(usize, usize)> = map.edges().collect();
    let deg = accumulate_degrees(prob.nodes(), &ends, w);
    let mut c = vec![0.0; w.len()];
    coefficients(&ends, w, &deg, prob.alpha(), &mut c)?;
    Ok(c)
}

/// Closed-form surrogate minimizer: the nonnegative root of
/// `2dⱼwⱼ + 2βwⱼ² − cⱼ = 0` for every edge.
pub fn mm_update(c: &[f64], prob: &ProblemInstance) -> Result<Vec<f64>> {
    if c.len() != prob.edges() {
        return Err(Error::InvalidArgument(format!(
            "coefficient vector has length {}, expected {}",
            c.len(),
            prob.edges()
        )));
    }
    if let Some(v) = c.iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "coefficients must be nonnegative, got {v}"
        )));
    }
    Ok(c
        .iter()
        .zip(prob.distances().values())
        .map(|(&cj, &dj)| quadratic_root(dj, cj, prob.beta()))
        .collect())
}

/// `(−2d + √(4d² + 8βc)) / (4β)`, written as `2c / (2d + √(4d² + 8βc))` so
/// that small `c` against large `d` does not cancel to zero.
#[inline]
fn quadratic_root(d: f64, c: f64, beta: f64) -> f64 {
    if c == 0.0 {
        return 0.0;
    }
    let disc = (4.0 * d * d + 8.0 * beta * c).sqrt();
    2.0 * c / (2.0 * d + disc)
}

/// The majorizer `g(w | wᵏ)` of the objective at `wᵏ`.
///
/// Edges with `wᵏⱼ = 0` carry no weight in the bound. Every node of `wᵏ` must
/// have positive degree. Returns `+∞` when `w` is zero on an edge where `wᵏ`
/// is positive.
pub fn surrogate_value(w: &[f64], w_k: &[f64], prob: &ProblemInstance) -> Result<f64> {
    prob.check_weights(w)?;
    prob.check_weights(w_k)?;
    let ends: Vec<(usize, usize)> = prob.edge_map().edges().collect();
    let deg_k = accumulate_degrees(prob.nodes(), &ends, w_k);
    if let Some(i) = deg_k.iter().position(|&g| g <= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "expansion point has zero degree at node {i}"
        )));
    }
    let alpha = prob.alpha();
    let beta = prob.beta();
    let mut acc = CompensatedSum::default();
    for (j, &(a, b)) in ends.iter().enumerate() {
        let wj = w[j];
        acc.add(2.0 * wj * prob.distances().values()[j] + beta * wj * wj);
        let wkj = w_k[j];
        if wkj == 0.0 {
            continue;
        }
        if wj == 0.0 {
            return Ok(f64::INFINITY);
        }
        for node in [a, b] {
            let share = wkj / deg_k[node];
            acc.add(-alpha * share * (deg_k[node] / wkj * wj).ln());
        }
    }
    Ok(acc.value())
}

/// Iterate plus bookkeeping for the MM loop.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub w: WeightVector,
    /// Live edge indices, ascending.
    pub active: Vec<usize>,
    pub f_trace: Vec<f64>,
    pub iters: usize,
}

impl SolverState {
    /// All-ones start with every edge live.
    pub fn initial(prob: &ProblemInstance) -> Self {
        let m = prob.edges();
        Self {
            w: WeightVector::ones(m),
            active: (0..m).collect(),
            f_trace: Vec::new(),
            iters: 0,
        }
    }

    /// All-ones start with the given edges held at zero.
    pub fn with_retired(prob: &ProblemInstance, retired: &[usize]) -> Result<Self> {
        let m = prob.edges();
        let mut w = vec![1.0; m];
        for &j in retired {
            if j >= m {
                return Err(Error::InvalidArgument(format!(
                    "edge {j} out of range for {m} edges"
                )));
            }
            w[j] = 0.0;
        }
        let active = (0..m).filter(|&j| w[j] > 0.0).collect();
        Ok(Self {
            w: WeightVector::new(w)?,
            active,
            f_trace: Vec::new(),
            iters: 0,
        })
    }
}

/// The active edges of a state in a contiguous layout.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactView {
    /// Original edge index of each slot.
    pub edge_ids: Vec<usize>,
    pub endpoints: Vec<(usize, usize)>,
    pub d: Vec<f64>,
    pub w: Vec<f64>,
}

impl CompactView {
    pub fn len(&self) -> usize {
        self.edge_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edge_ids.is_empty()
    }

    /// Scatter the compact weights back into a full-length vector.
    pub fn scatter(&self, m: usize) -> Vec<f64> {
        let mut full = vec![0.0; m];
        for (&j, &wj) in self.edge_ids.iter().zip(&self.w) {
            full[j] = wj;
        }
        full
    }

    fn retain_positive(&mut self) {
        let keep: Vec<bool> = self.w.iter().map(|&w| w > 0.0).collect();
        let mut flags = keep.iter();
        self.edge_ids.retain(|_| *flags.next().unwrap());
        let mut flags = keep.iter();
        self.endpoints.retain(|_| *flags.next().unwrap());
        let mut flags = keep.iter();
        self.d.retain(|_| *flags.next().unwrap());
        self.w.retain(|&w| w > 0.0);
    }
}

pub fn compress_active(state: &SolverState, prob: &ProblemInstance) -> CompactView {
    let map = prob.edge_map();
    let d = prob.distances().values();
    let w = state.w.values();
    let mut view = CompactView {
        edge_ids: Vec::with_capacity(state.active.len()),
        endpoints: Vec::with_capacity(state.active.len()),
        d: Vec::with_capacity(state.active.len()),
        w: Vec::with_capacity(state.active.len()),
    };
    for &j in &state.active {
        view.edge_ids.push(j);
        view.endpoints.push(endpoints_of(&map, j));
        view.d.push(d[j]);
        view.w.push(w[j]);
    }
    view
}

fn endpoints_of(map: &EdgeIndexMap, j: usize) -> (usize, usize) {
    map.endpoints(j).expect("active edge index within range")
}

/// Per-iteration snapshot handed to [`solve_with_observer`] callbacks.
#[derive(Debug)]
pub struct IterationView<'a> {
    /// Index of the iterate produced by this step (1 for the first update).
    pub iter: usize,
    /// Working-set edge indices; may include retired edges until the next
    /// compaction.
    pub edge_ids: &'a [usize],
    /// Coefficients computed from the previous iterate, aligned with `edge_ids`.
    pub c: &'a [f64],
    /// New iterate, aligned with `edge_ids`.
    pub w: &'a [f64],
    /// Node degrees of the previous iterate.
    pub degrees: &'a [f64],
    pub active_count: usize,
    pub f: f64,
    pub m: usize,
}

impl IterationView<'_> {
    pub fn c_sum(&self) -> f64 {
        let mut acc = CompensatedSum::default();
        for &c in self.c {
            acc.add(c);
        }
        acc.value()
    }

    pub fn weights_full(&self) -> Vec<f64> {
        let mut full = vec![0.0; self.m];
        for (&j, &wj) in self.edge_ids.iter().zip(self.w) {
            full[j] = wj;
        }
        full
    }
}

/// Runs the MM iteration from the all-ones start.
pub fn solve(prob: &ProblemInstance, cfg: &SolverConfig) -> Result<SolveResult> {
    solve_with_observer(prob, cfg, |_| {})
}

pub fn solve_with_observer<F>(prob: &ProblemInstance, cfg: &SolverConfig, observer: F) -> Result<SolveResult>
where
    F: FnMut(&IterationView<'_>),
{
    solve_state(prob, SolverState::initial(prob), cfg, observer)
}

/// Runs the MM iteration from a state produced by [`SolverState::initial`] or
/// [`SolverState::with_retired`].
pub fn solve_state<F>(
    prob: &ProblemInstance,
    mut state: SolverState,
    cfg: &SolverConfig,
    mut observer: F,
) -> Result<SolveResult>
where
    F: FnMut(&IterationView<'_>),
{
    cfg.validate()?;
    prob.check_weights(state.w.values())?;
    if let Some(&j) = state.active.iter().find(|&&j| j >= prob.edges()) {
        return Err(Error::InvalidArgument(format!("active edge {j} out of range")));
    }
    if state.w.values().iter().enumerate().any(|(j, &w)| w > 0.0 && state.active.binary_search(&j).is_err()) {
        return Err(Error::InvalidArgument("state has positive weight outside its active set".into()));
    }

    let start = Instant::now();
    let m = prob.edges();
    let p = prob.nodes();
    let alpha = prob.alpha();
    let beta = prob.beta();
    let tau = if cfg.elimination_enabled { cfg.elimination_threshold } else { 0.0 };

    let mut view = compress_active(&state, prob);
    let mut compacted_len = view.len();
    let mut trace = ConvergenceTrace::new();

    let mut deg = accumulate_degrees(p, &view.endpoints, &view.w);
    let mut f = view_objective(&view, &deg, prob);
    trace.push(TraceRecord {
        iter: 0,
        f,
        active_count: count_positive(&view.w),
        wall_time: start.elapsed(),
    });
    state.f_trace.push(f);

    if view.is_empty() {
        return Ok(finish(state, view, m, f, trace, true));
    }

    let mut c = vec![0.0; view.len()];
    let mut next = vec![0.0; view.len()];
    let mut converged = false;

    while state.iters < cfg.max_iters {
        c.resize(view.len(), 0.0);
        next.resize(view.len(), 0.0);
        coefficients(&view.endpoints, &view.w, &deg, alpha, &mut c)?;
        for ((out, &cj), &dj) in next.iter_mut().zip(&c).zip(&view.d) {
            *out = quadratic_root(dj, cj, beta);
        }
        if tau > 0.0 {
            eliminate(p, &view.endpoints, &mut next, tau);
        }

        let next_deg = accumulate_degrees(p, &view.endpoints, &next);
        let f_next = objective_terms(&next, &view.d, &next_deg, alpha, beta);
        let active_count = count_positive(&next);
        state.iters += 1;

        observer(&IterationView {
            iter: state.iters,
            edge_ids: &view.edge_ids,
            c: &c,
            w: &next,
            degrees: &deg,
            active_count,
            f: f_next,
            m,
        });
        trace.push(TraceRecord {
            iter: state.iters,
            f: f_next,
            active_count,
            wall_time: start.elapsed(),
        });
        state.f_trace.push(f_next);

        let change = (f - f_next).abs();
        let stop = if f == 0.0 { change <= cfg.epsilon } else { change / f.abs() <= cfg.epsilon };

        std::mem::swap(&mut view.w, &mut next);
        deg = next_deg;
        f = f_next;

        if stop {
            converged = true;
            break;
        }
        if cfg.compaction && (active_count as f64) < 0.5 * compacted_len as f64 {
            view.retain_positive();
            compacted_len = view.len();
        }
    }

    Ok(finish(state, view, m, f, trace, converged))
}

fn finish(
    mut state: SolverState,
    view: CompactView,
    m: usize,
    f: f64,
    trace: ConvergenceTrace,
    converged: bool,
) -> SolveResult {
    let w = view.scatter(m);
    state.active = (0..m).filter(|&j| w[j] > 0.0).collect();
    SolveResult {
        w_star: WeightVector::new(w).expect("MM iterates stay finite and nonnegative"),
        f_star: f,
        trace,
        converged,
        iters: state.iters,
    }
}

fn accumulate_degrees(p: usize, ends: &[(usize, usize)], w: &[f64]) -> Vec<f64> {
    let mut deg = vec![0.0; p];
    for (&(a, b), &wj) in ends.iter().zip(w) {
        deg[a] += wj;
        deg[b] += wj;
    }
    deg
}

fn coefficients(ends: &[(usize, usize)], w: &[f64], deg: &[f64], alpha: f64, c: &mut [f64]) -> Result<()> {
    let inv: Vec<f64> = deg.iter().map(|&g| if g > 0.0 { 1.0 / g } else { 0.0 }).collect();
    for ((out, &(a, b)), &wj) in c.iter_mut().zip(ends).zip(w) {
        if wj == 0.0 {
            *out = 0.0;
            continue;
        }
        if deg[a] <= 0.0 || deg[b] <= 0.0 {
            return Err(Error::Inconsistent(format!(
                "edge ({a}, {b}) has weight {wj} but an endpoint has zero degree"
            )));
        }
        *out = alpha * wj * (inv[a] + inv[b]);
    }
    Ok(())
}

/// Clamp weights below `tau` to zero, except where that would leave a node
/// with no incident weight at all.
fn eliminate(p: usize, ends: &[(usize, usize)], w: &mut [f64], tau: f64) {
    let mut survivors = vec![0usize; p];
    for (&(a, b), &wj) in ends.iter().zip(w.iter()) {
        if wj >= tau {
            survivors[a] += 1;
            survivors[b] += 1;
        }
    }
    // A node whose every incident weight is small keeps its largest edge.
    let mut keep_best: Vec<Option<(usize, f64)>> = vec![None; p];
    for (j, (&(a, b), &wj)) in ends.iter().zip(w.iter()).enumerate() {
        if wj > 0.0 && wj < tau {
            for node in [a, b] {
                if survivors[node] == 0 && keep_best[node].is_none_or(|(_, best)| wj > best) {
                    keep_best[node] = Some((j, wj));
                }
            }
        }
    }
    let mut keep = vec![false; w.len()];
    for (j, _) in keep_best.into_iter().flatten() {
        keep[j] = true;
    }
    for (j, wj) in w.iter_mut().enumerate() {
        if *wj < tau && !keep[j] {
            *wj = 0.0;
        }
    }
}

fn count_positive(w: &[f64]) -> usize {
    w.iter().filter(|&&x| x > 0.0).count()
}

fn view_objective(view: &CompactView, deg: &[f64], prob: &ProblemInstance) -> f64 {
    objective_terms(&view.w, &view.d, deg, prob.alpha(), prob.beta())
}

fn objective_terms(w: &[f64], d: &[f64], deg: &[f64], alpha: f64, beta: f64) -> f64 {
    if deg.iter().any(|&g| g <= 0.0) {
        return f64::INFINITY;
    }
    let mut acc = CompensatedSum::default();
    for (&wj, &dj) in w.iter().zip(d) {
        acc.add(2.0 * wj * dj + beta * wj * wj);
    }
    for &g in deg {
        acc.add(-alpha * g.ln());
    }
    acc.value()
}
