//! Ground-truth graphs and smooth signals on them.
//!
//! Randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`), seeded with
//! `seed_from_u64`. Graph generation draws from stream 0 and signal
//! generation from stream 1 of the same seed, so a seed fixes both and the
//! two never overlap. ChaCha output is specified bit-for-bit, which makes
//! every generated graph and signal matrix reproducible across platforms up
//! to the floating-point behaviour of the eigendecomposition.
//!
//! Signals follow the Gaussian smoothness model: each of the `n` columns of
//! the `p × n` data matrix is an independent draw from `N(0, L† + σ²I)` where
//! `L†` is the pseudo-inverse of the ground-truth Laplacian.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::graph_model::{edge_count, pairwise_distances, EdgeIndexMap, ProblemInstance, WeightVector};
use crate::{Error, Result};

const GRAPH_STREAM: u64 = 0;
const SIGNAL_STREAM: u64 = 1;

/// Relative cutoff below which Laplacian eigenvalues count as zero.
pub const PINV_RCOND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSeed(pub u64);

impl RngSeed {
    fn rng(self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(stream);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphFamily {
    ErdosRenyi { prob_edge: f64 },
    StochasticBlock { p_in: f64, p_out: f64 },
    Loaded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthGraph {
    pub p: usize,
    pub w_true: WeightVector,
    pub family: GraphFamily,
}

impl GroundTruthGraph {
    pub fn new(p: usize, w_true: WeightVector, family: GraphFamily) -> Result<Self> {
        EdgeIndexMap::new(p)?;
        if w_true.len() != edge_count(p) {
            return Err(Error::InvalidArgument(format!(
                "graph on {p} nodes needs {} weights, got {}",
                edge_count(p),
                w_true.len()
            )));
        }
        Ok(Self { p, w_true, family })
    }

    pub fn edge_count(&self) -> usize {
        self.w_true.values().iter().filter(|&&w| w > 0.0).count()
    }

    /// `L = diag(W1) − W`.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut lap = DMatrix::zeros(self.p, self.p);
        for ((i, j), &w) in EdgeIndexMap::new(self.p)
            .expect("validated at construction")
            .edges()
            .zip(self.w_true.values())
        {
            lap[(i, j)] -= w;
            lap[(j, i)] -= w;
            lap[(i, i)] += w;
            lap[(j, j)] += w;
        }
        lap
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalModel {
    pub sigma: f64,
    pub n: usize,
}

impl SignalModel {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("sample count n must be at least 1".into()));
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "sigma must be nonnegative, got {}",
                self.sigma
            )));
        }
        Ok(())
    }
}

fn check_probability(name: &str, q: f64) -> Result<()> {
    if (0.0..=1.0).contains(&q) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must lie in [0, 1], got {q}")))
    }
}

/// Erdős–Rényi graph: every pair is an edge of weight 1 with probability
/// `prob_edge`, independently, drawn in edge order.
pub fn gen_er(p: usize, prob_edge: f64, seed: RngSeed) -> Result<GroundTruthGraph> {
    check_probability("edge probability", prob_edge)?;
    let map = EdgeIndexMap::new(p)?;
    let mut rng = seed.rng(GRAPH_STREAM);
    let w = map
        .edges()
        .map(|_| if rng.random::<f64>() < prob_edge { 1.0 } else { 0.0 })
        .collect();
    GroundTruthGraph::new(p, WeightVector::new(w)?, GraphFamily::ErdosRenyi { prob_edge })
}

/// Block of node `i` in the two-block model: the first `⌊p/2⌋` nodes form
/// block 0, the remaining `⌈p/2⌉` block 1.
pub fn sbm_block(i: usize, p: usize) -> usize {
    usize::from(i >= p / 2)
}

/// Two-block stochastic block model with unit weights.
pub fn gen_sbm(p: usize, p_in: f64, p_out: f64, seed: RngSeed) -> Result<GroundTruthGraph> {
    check_probability("within-block probability", p_in)?;
    check_probability("between-block probability", p_out)?;
    let map = EdgeIndexMap::new(p)?;
    let mut rng = seed.rng(GRAPH_STREAM);
    let w = map
        .edges()
        .map(|(i, j)| {
            let q = if sbm_block(i, p) == sbm_block(j, p) { p_in } else { p_out };
            if rng.random::<f64>() < q { 1.0 } else { 0.0 }
        })
        .collect();
    GroundTruthGraph::new(p, WeightVector::new(w)?, GraphFamily::StochasticBlock { p_in, p_out })
}

/// Eigendecomposition of a Laplacian with the near-zero part of the spectrum
/// snapped to exactly zero.
struct PseudoSpectrum {
    vectors: DMatrix<f64>,
    values: DVector<f64>,
}

impl PseudoSpectrum {
    fn of(lap: DMatrix<f64>) -> Self {
        let eig = SymmetricEigen::new(lap);
        let max = eig.eigenvalues.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        let cutoff = PINV_RCOND * max;
        let values = eig.eigenvalues.map(|v| if v > cutoff { v } else { 0.0 });
        Self {
            vectors: eig.eigenvectors,
            values,
        }
    }

    fn reconstruct(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let scaled = DVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|&v| if v > 0.0 { f(v) } else { 0.0 }),
        );
        let mut left = self.vectors.clone();
        for (mut col, s) in left.column_iter_mut().zip(scaled.iter()) {
            col *= *s;
        }
        let mut out = &left * self.vectors.transpose();
        // exact symmetry
        for i in 0..out.nrows() {
            for j in i + 1..out.ncols() {
                let avg = 0.5 * (out[(i, j)] + out[(j, i)]);
                out[(i, j)] = avg;
                out[(j, i)] = avg;
            }
        }
        out
    }
}

/// Moore–Penrose pseudo-inverse of the graph Laplacian.
pub fn laplacian_pinv(g: &GroundTruthGraph) -> Result<DMatrix<f64>> {
    if g.p == 0 {
        return Err(Error::InvalidArgument("graph has no nodes".into()));
    }
    Ok(PseudoSpectrum::of(g.laplacian()).reconstruct(|v| 1.0 / v))
}

/// Eigenvalues of the Laplacian after zero snapping, ascending.
pub fn laplacian_spectrum(g: &GroundTruthGraph) -> Vec<f64> {
    let mut v: Vec<f64> = PseudoSpectrum::of(g.laplacian()).values.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Draws a `p × n` signal matrix with columns `(L†)^{1/2} z + σ e`, where
/// `z` and `e` are standard normal and drawn column by column (`z` first).
pub fn gen_signals(g: &GroundTruthGraph, model: &SignalModel, seed: RngSeed) -> Result<DMatrix<f64>> {
    model.validate()?;
    let p = g.p;
    let root = PseudoSpectrum::of(g.laplacian()).reconstruct(|v| 1.0 / v.sqrt());
    let mut rng = seed.rng(SIGNAL_STREAM);
    let mut z = DMatrix::zeros(p, model.n);
    let mut e = DMatrix::zeros(p, model.n);
    for t in 0..model.n {
        for i in 0..p {
            z[(i, t)] = rng.sample(StandardNormal);
        }
        for i in 0..p {
            e[(i, t)] = rng.sample(StandardNormal);
        }
    }
    let mut x = &root * z;
    x += e * model.sigma;
    Ok(x)
}

/// Problem instance whose distances come from the rows of `x`.
pub fn assemble(x: &DMatrix<f64>, alpha: f64, beta: f64) -> Result<ProblemInstance> {
    let d = pairwise_distances(x)?;
    ProblemInstance::from_distances(x.nrows(), d, alpha, beta)
}

/// Signals drawn on `g` followed by [`assemble`].
pub fn assemble_from_graph(
    g: &GroundTruthGraph,
    model: &SignalModel,
    seed: RngSeed,
    alpha: f64,
    beta: f64,
) -> Result<ProblemInstance> {
    assemble(&gen_signals(g, model, seed)?, alpha, beta)
}
