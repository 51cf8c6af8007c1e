//! # graphmm
//!
//! Learn a sparse weighted graph from signals that vary smoothly over its
//! nodes. The learned adjacency `W` minimizes
//!
//! ```text
//! f(w) = 2 wᵀd − α Σᵢ log((Sw)ᵢ) + β ‖w‖²,   w ≥ 0
//! ```
//!
//! where `w` holds the strict upper triangle of `W` in row-major order, `d`
//! the matching squared distances between node signals and `Sw` the node
//! degrees.
//!
//! The main solver is a majorization-minimization scheme: each step replaces
//! the log-barrier by a Jensen upper bound that separates over the edges, and
//! the separable surrogate has a closed-form minimizer (the positive root of a
//! scalar quadratic). Edges whose weight reaches zero stay at zero, so they
//! are retired from the working set as the iterations proceed.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`graph_model`] | edge indexing, degrees, distances, objective |
//! | [`mm_solver`] | surrogate, closed-form update, active-set solve loop |
//! | [`data_gen`] | ER / SBM ground truth, smooth Gaussian signals |
//! | [`baseline_oracle`] | projected gradient and brute-force reference solvers |
//! | [`bench`] | experiment runner, Monte-Carlo summaries, CSV output |
//!
//! ```rust
//! use graphmm::{graph_model::ProblemInstance, mm_solver::{solve, SolverConfig}};
//!
//! // Three nodes, all signals identical: the optimum is 1/√2 on every edge.
//! let prob = ProblemInstance::new(3, vec![0.0; 3], 1.0, 1.0).unwrap();
//! let res = solve(&prob, &SolverConfig::default()).unwrap();
//! assert!(res.converged);
//! assert!((res.w_star.values()[0] - 0.5f64.sqrt()).abs() < 1e-12);
//! ```

pub mod baseline_oracle;
pub mod bench;
pub mod data_gen;
mod error;
pub mod graph_model;
pub mod io;
pub mod mm_solver;
mod sum;
pub mod trace;

pub use error::{Error, Result};
