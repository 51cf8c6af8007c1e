//! Shared data model: edge indexing, the degree operator, pairwise distances
//! and the objective.
//!
//! Edges `(i, j)` with `i < j` are laid out row-major over the strict upper
//! triangle of the adjacency matrix:
//!
//! ```text
//! p = 4:   (0,1) (0,2) (0,3) (1,2) (1,3) (2,3)
//!            0     1     2     3     4     5
//! ```

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::sum::CompensatedSum;
use crate::{Error, Result};

/// Number of node pairs for `p` nodes.
#[inline]
pub fn edge_count(p: usize) -> usize {
    p * p.saturating_sub(1) / 2
}

/// Linear position of edge `(i, j)` in row-major strict-upper-triangle order.
pub fn edge_index(i: usize, j: usize, p: usize) -> Result<usize> {
    if i >= j || j >= p {
        return Err(Error::InvalidArgument(format!(
            "edge ({i}, {j}) is not a strict upper-triangle pair for p = {p}"
        )));
    }
    Ok(edge_index_unchecked(i, j, p))
}

#[inline]
fn edge_index_unchecked(i: usize, j: usize, p: usize) -> usize {
    i * p - i * (i + 1) / 2 + (j - i - 1)
}

/// The bijection between node pairs and linear edge positions for a fixed `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeIndexMap {
    p: usize,
}

impl EdgeIndexMap {
    pub fn new(p: usize) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidArgument(format!(
                "a graph needs at least 2 nodes, got {p}"
            )));
        }
        Ok(Self { p })
    }

    pub fn nodes(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        edge_count(self.p)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, i: usize, j: usize) -> Result<usize> {
        edge_index(i, j, self.p)
    }

    /// Inverse of [`EdgeIndexMap::index`].
    pub fn endpoints(&self, k: usize) -> Result<(usize, usize)> {
        if k >= self.len() {
            return Err(Error::InvalidArgument(format!(
                "edge index {k} out of range for {} edges",
                self.len()
            )));
        }
        // Row i starts at i*p - i(i+1)/2 and holds p-1-i entries.
        let mut i = 0;
        let mut start = 0;
        loop {
            let row_len = self.p - 1 - i;
            if k < start + row_len {
                return Ok((i, i + 1 + (k - start)));
            }
            start += row_len;
            i += 1;
        }
    }

    /// All pairs in index order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let p = self.p;
        (0..p).flat_map(move |i| (i + 1..p).map(move |j| (i, j)))
    }
}

/// Nonnegative edge weights in edge order.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((k, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::InvalidArgument(format!(
                "weight {k} must be finite and nonnegative, got {v}"
            )));
        }
        Ok(Self(values))
    }

    pub fn zeros(m: usize) -> Self {
        Self(vec![0.0; m])
    }

    pub fn ones(m: usize) -> Self {
        Self(vec![1.0; m])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Dense symmetric adjacency with zero diagonal.
    pub fn to_adjacency(&self, p: usize) -> Result<DMatrix<f64>> {
        if self.len() != edge_count(p) {
            return Err(length_mismatch("weight vector", self.len(), p));
        }
        let map = EdgeIndexMap::new(p)?;
        let mut adj = DMatrix::zeros(p, p);
        for ((i, j), &w) in map.edges().zip(&self.0) {
            adj[(i, j)] = w;
            adj[(j, i)] = w;
        }
        Ok(adj)
    }

    /// Reads the strict upper triangle of a square matrix. The lower triangle
    /// and diagonal are ignored.
    pub fn from_adjacency(adj: &DMatrix<f64>) -> Result<Self> {
        if adj.nrows() != adj.ncols() {
            return Err(Error::InvalidArgument(format!(
                "adjacency must be square, got {} x {}",
                adj.nrows(),
                adj.ncols()
            )));
        }
        let map = EdgeIndexMap::new(adj.nrows())?;
        Self::new(map.edges().map(|(i, j)| adj[(i, j)]).collect())
    }
}

/// Squared Euclidean distances between node signals, in edge order.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceVector(Vec<f64>);

impl DistanceVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((k, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::InvalidArgument(format!(
                "distance {k} must be finite and nonnegative, got {v}"
            )));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `d[idx(i,j)] = Σ_t (X[i,t] − X[j,t])²` for a `p × n` data matrix whose row
/// `i` holds the samples observed at node `i`.
pub fn pairwise_distances(x: &DMatrix<f64>) -> Result<DistanceVector> {
    let (p, n) = x.shape();
    let map = EdgeIndexMap::new(p)?;
    if n == 0 {
        return Err(Error::InvalidData("data matrix has no samples".into()));
    }
    if let Some(pos) = x.iter().position(|v| !v.is_finite()) {
        // nalgebra storage is column-major
        return Err(Error::InvalidData(format!(
            "non-finite entry at row {}, column {}",
            pos % p,
            pos / p
        )));
    }
    let rows: Vec<Vec<f64>> = (0..p).map(|i| x.row(i).iter().copied().collect()).collect();
    let per_row: Vec<Vec<f64>> = (0..p)
        .into_par_iter()
        .map(|i| {
            let xi = &rows[i];
            rows[i + 1..]
                .iter()
                .map(|xj| {
                    xi.iter()
                        .zip(xj)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                })
                .collect()
        })
        .collect();
    let mut d = Vec::with_capacity(map.len());
    for row in per_row {
        d.extend(row);
    }
    Ok(DistanceVector(d))
}

/// The node-degree map `w ↦ Sw = W1`, evaluated by accumulation over edges
/// without storing `S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeOperator {
    map: EdgeIndexMap,
}

impl DegreeOperator {
    pub fn new(p: usize) -> Result<Self> {
        Ok(Self {
            map: EdgeIndexMap::new(p)?,
        })
    }

    pub fn apply(&self, w: &[f64]) -> Result<Vec<f64>> {
        let p = self.map.nodes();
        if w.len() != self.map.len() {
            return Err(length_mismatch("weight vector", w.len(), p));
        }
        let mut deg = vec![0.0; p];
        for ((i, j), &wk) in self.map.edges().zip(w) {
            deg[i] += wk;
            deg[j] += wk;
        }
        Ok(deg)
    }
}

/// Node degrees of `w` for a `p`-node graph.
pub fn degrees(w: &WeightVector, p: usize) -> Result<Vec<f64>> {
    DegreeOperator::new(p)?.apply(w.values())
}

/// Everything that defines `f`: node count, distances and the two weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    p: usize,
    d: DistanceVector,
    alpha: f64,
    beta: f64,
}

impl ProblemInstance {
    pub fn new(p: usize, d: Vec<f64>, alpha: f64, beta: f64) -> Result<Self> {
        Self::from_distances(p, DistanceVector::new(d)?, alpha, beta)
    }

    pub fn from_distances(p: usize, d: DistanceVector, alpha: f64, beta: f64) -> Result<Self> {
        EdgeIndexMap::new(p)?;
        if d.len() != edge_count(p) {
            return Err(length_mismatch("distance vector", d.len(), p));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "beta must be positive, got {beta}"
            )));
        }
        Ok(Self { p, d, alpha, beta })
    }

    pub fn nodes(&self) -> usize {
        self.p
    }

    pub fn edges(&self) -> usize {
        self.d.len()
    }

    pub fn distances(&self) -> &DistanceVector {
        &self.d
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn edge_map(&self) -> EdgeIndexMap {
        EdgeIndexMap { p: self.p }
    }

    pub(crate) fn check_weights(&self, w: &[f64]) -> Result<()> {
        if w.len() != self.edges() {
            return Err(length_mismatch("weight vector", w.len(), self.p));
        }
        if let Some((k, v)) = w.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "weight {k} is negative or NaN: {v}"
            )));
        }
        Ok(())
    }
}

/// `f(w) = 2wᵀd − α Σᵢ log(deg_i) + β‖w‖²`, or `+∞` when some node has zero
/// degree.
pub fn objective(w: &[f64], prob: &ProblemInstance) -> Result<f64> {
    prob.check_weights(w)?;
    let deg = DegreeOperator { map: prob.edge_map() }.apply(w)?;
    Ok(objective_from_degrees(w, &deg, prob))
}

pub(crate) fn objective_from_degrees(w: &[f64], deg: &[f64], prob: &ProblemInstance) -> f64 {
    if deg.iter().any(|&g| g <= 0.0) {
        return f64::INFINITY;
    }
    let mut acc = CompensatedSum::default();
    for (&wk, &dk) in w.iter().zip(prob.d.values()) {
        acc.add(2.0 * wk * dk + prob.beta * wk * wk);
    }
    for &g in deg {
        acc.add(-prob.alpha * g.ln());
    }
    acc.value()
}

/// `∂f/∂w_k = 2d_k + 2βw_k − α(1/deg_i + 1/deg_j)` for edge `k = (i, j)`.
pub fn gradient(w: &[f64], prob: &ProblemInstance) -> Result<Vec<f64>> {
    prob.check_weights(w)?;
    let deg = DegreeOperator { map: prob.edge_map() }.apply(w)?;
    let alpha = prob.alpha;
    let beta = prob.beta;
    Ok(prob
        .edge_map()
        .edges()
        .zip(w.iter().zip(prob.d.values()))
        .map(|((i, j), (&wk, &dk))| {
            2.0 * dk + 2.0 * beta * wk - alpha * (1.0 / deg[i] + 1.0 / deg[j])
        })
        .collect())
}

fn length_mismatch(what: &str, len: usize, p: usize) -> Error {
    Error::InvalidArgument(format!(
        "{what} has length {len}, expected {} for p = {p}",
        edge_count(p)
    ))
}
