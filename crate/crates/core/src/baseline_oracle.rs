//! Reference solvers used to certify the MM optimum.
//!
//! Neither solver shares code with the MM iteration beyond the objective and
//! its gradient. [`pg_solve`] is projected gradient with Barzilai-Borwein
//! trial steps and Armijo backtracking. [`brute_force`] is an exhaustive grid
//! followed by cyclic golden-section coordinate search and only looks at
//! objective values.

use std::time::Instant;

use crate::graph_model::{gradient, objective, ProblemInstance, WeightVector};
use crate::trace::{ConvergenceTrace, SolveResult, TraceRecord};
use crate::{Error, Result};

/// Lower bound kept by the projection so the barrier stays finite.
pub const PROJECTION_FLOOR: f64 = 1e-12;
/// Reported weights below this are set to zero.
pub const REPORT_ZERO: f64 = 1e-8;

const ARMIJO_C: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    /// Projected-gradient norm at which the solve stops.
    pub tol: f64,
    pub max_iters: usize,
    pub initial_step: f64,
    pub backtrack_factor: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iters: 1_000_000,
            initial_step: 1.0,
            backtrack_factor: 0.5,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.tol > 0.0
            && self.max_iters >= 1
            && self.initial_step > 0.0
            && self.backtrack_factor > 0.0
            && self.backtrack_factor < 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid oracle configuration {self:?}")))
        }
    }
}

fn project(w: f64) -> f64 {
    w.max(PROJECTION_FLOOR)
}

fn projected_gradient_norm(w: &[f64], g: &[f64]) -> f64 {
    w.iter()
        .zip(g)
        .map(|(&wj, &gj)| if wj <= PROJECTION_FLOOR && gj > 0.0 { 0.0 } else { gj * gj })
        .sum::<f64>()
        .sqrt()
}

/// Projected gradient descent on the nonnegative orthant.
pub fn pg_solve(prob: &ProblemInstance, cfg: &OracleConfig) -> Result<SolveResult> {
    cfg.validate()?;
    let start = Instant::now();
    let m = prob.edges();
    let mut w = vec![1.0; m];
    let mut f = objective(&w, prob)?;
    let mut trace = ConvergenceTrace::new();
    trace.push(TraceRecord { iter: 0, f, active_count: m, wall_time: start.elapsed() });

    let mut step = cfg.initial_step;
    let mut converged = false;
    let mut iters = 0;
    let mut candidate = vec![0.0; m];
    let mut previous: Option<(Vec<f64>, Vec<f64>)> = None;

    while iters < cfg.max_iters {
        let g = gradient(&w, prob)?;
        if projected_gradient_norm(&w, &g) <= cfg.tol {
            converged = true;
            break;
        }
        // Barzilai-Borwein trial step, then Armijo backtracking from it
        step = match &previous {
            Some((w_old, g_old)) => {
                let (mut ss, mut sy) = (0.0, 0.0);
                for j in 0..m {
                    let s = w[j] - w_old[j];
                    ss += s * s;
                    sy += s * (g[j] - g_old[j]);
                }
                if sy > 0.0 { (ss / sy).clamp(1e-12, 1e12) } else { step / cfg.backtrack_factor }
            }
            None => cfg.initial_step,
        };
        let f_new = loop {
            for ((c, &wj), &gj) in candidate.iter_mut().zip(&w).zip(&g) {
                *c = project(wj - step * gj);
            }
            let f_try = objective(&candidate, prob)?;
            let predicted: f64 = g.iter().zip(candidate.iter().zip(&w)).map(|(gj, (c, wj))| gj * (c - wj)).sum();
            // strict decrease: steps that leave f unchanged make no progress
            if f_try < f && f_try <= f + ARMIJO_C * predicted {
                break Some(f_try);
            }
            step *= cfg.backtrack_factor;
            if step < 1e-300 {
                break None;
            }
        };
        let Some(f_new) = f_new else {
            // no descent step left at working precision
            converged = projected_gradient_norm(&w, &g) <= cfg.tol.sqrt();
            break;
        };
        previous = Some((w.clone(), g));
        std::mem::swap(&mut w, &mut candidate);
        f = f_new;
        iters += 1;
        trace.push(TraceRecord {
            iter: iters,
            f,
            active_count: w.iter().filter(|&&x| x > PROJECTION_FLOOR).count(),
            wall_time: start.elapsed(),
        });
    }

    let reported: Vec<f64> = w.iter().map(|&x| if x < REPORT_ZERO { 0.0 } else { x }).collect();
    let f_reported = objective(&reported, prob)?;
    let (w_star, f_star) = if f_reported.is_finite() { (reported, f_reported) } else { (w, f) };
    Ok(SolveResult {
        w_star: WeightVector::new(w_star)?,
        f_star,
        trace,
        converged,
        iters,
    })
}

/// Scalar optimum `(−d + √(d² + 4αβ)) / (2β)` of the two-node problem.
pub fn two_node_optimum(d: f64, alpha: f64, beta: f64) -> f64 {
    (-d + (d * d + 4.0 * alpha * beta).sqrt()) / (2.0 * beta)
}

/// Twice the largest two-node optimum over the distances of `prob`.
pub fn default_box_upper(prob: &ProblemInstance) -> f64 {
    2.0 * prob
        .distances()
        .values()
        .iter()
        .map(|&d| two_node_optimum(d, prob.alpha(), prob.beta()))
        .fold(0.0, f64::max)
}

pub const BRUTE_FORCE_MAX_EDGES: usize = 4;

/// Exhaustive grid over `[floor, box_upper]^m` refined by cyclic
/// golden-section coordinate search.
pub fn brute_force(prob: &ProblemInstance, grid_resolution: usize, box_upper: Option<f64>) -> Result<WeightVector> {
    let m = prob.edges();
    if m > BRUTE_FORCE_MAX_EDGES {
        return Err(Error::UnsupportedSize(format!(
            "brute force handles at most {BRUTE_FORCE_MAX_EDGES} edges, got {m}"
        )));
    }
    if grid_resolution < 2 {
        return Err(Error::InvalidArgument("grid resolution must be at least 2".into()));
    }
    let upper = box_upper.unwrap_or_else(|| default_box_upper(prob));
    if !(upper > PROJECTION_FLOOR) {
        return Err(Error::InvalidArgument(format!("box upper bound must be positive, got {upper}")));
    }

    let axis: Vec<f64> = std::iter::once(PROJECTION_FLOOR)
        .chain((1..grid_resolution).map(|k| upper * k as f64 / (grid_resolution - 1) as f64))
        .collect();
    let mut best = vec![upper; m];
    let mut best_f = objective(&best, prob)?;
    let mut digits = vec![0usize; m];
    let mut point = vec![0.0; m];
    'grid: loop {
        for (x, &k) in point.iter_mut().zip(&digits) {
            *x = axis[k];
        }
        let f = objective(&point, prob)?;
        if f < best_f {
            best_f = f;
            best.copy_from_slice(&point);
        }
        for k in digits.iter_mut() {
            *k += 1;
            if *k < axis.len() {
                continue 'grid;
            }
            *k = 0;
        }
        break;
    }

    let spacing = upper / (grid_resolution - 1) as f64;
    for _sweep in 0..10_000 {
        let mut moved = 0.0f64;
        for j in 0..m {
            let lo = PROJECTION_FLOOR;
            let hi = (best[j] + 2.0 * spacing).max(2.0 * best[j]);
            let old = best[j];
            let x = golden_section(lo, hi, |t| {
                let mut probe = best.clone();
                probe[j] = t;
                objective(&probe, prob).unwrap_or(f64::INFINITY)
            });
            let mut probe = best.clone();
            probe[j] = x;
            let f = objective(&probe, prob)?;
            if f <= best_f {
                best_f = f;
                best[j] = x;
            }
            moved = moved.max((best[j] - old).abs());
        }
        if moved <= 1e-13 * upper.max(1.0) {
            break;
        }
    }
    WeightVector::new(best)
}

fn golden_section(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let mut fa = f(a);
    let mut fb = f(b);
    for _ in 0..200 {
        if hi - lo <= 1e-15 * hi.abs().max(1e-12) {
            break;
        }
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = f(b);
        }
    }
    0.5 * (lo + hi)
}
