//! Sparse recovery from structured measurements and image-quality metrics.

pub mod iht;
pub mod kcs;
pub mod metrics;
pub mod omp;

use nalgebra::DMatrix;
use serde::Serialize;

pub use iht::{hard_threshold, iht};
pub use kcs::{kcs_recover, KcsOptions};
pub use metrics::{psnr, ssim};
pub use omp::omp;

/// Output of any solver.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconResult {
    /// Estimate; column-major when `shape` is set.
    pub estimate: Vec<f64>,
    pub shape: Option<(usize, usize)>,
    pub iterations: usize,
    /// `‖y − A·estimate‖` for the measurements the solver saw.
    pub residual: f64,
    pub support: Option<Vec<usize>>,
    pub converged: bool,
    /// Objective (or residual, for greedy solvers) after each iteration.
    pub history: Vec<f64>,
}

impl ReconResult {
    pub fn as_matrix(&self) -> Option<DMatrix<f64>> {
        self.shape
            .map(|(r, c)| DMatrix::from_column_slice(r, c, &self.estimate))
    }
}

/// Solver selection for experiments that treat the solver as a parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(tag = "solver", rename_all = "lowercase")]
pub enum SolverChoice {
    Omp { s_max: usize, tol: f64 },
    Iht { s: usize, max_iters: usize, step: f64 },
}

impl SolverChoice {
    pub fn omp(s_max: usize) -> Self {
        SolverChoice::Omp { s_max, tol: 1e-6 }
    }

    pub fn iht(s: usize) -> Self {
        SolverChoice::Iht { s, max_iters: 500, step: 1.0 }
    }

    pub fn solve<O: crate::operators::LinearOperator + ?Sized>(
        &self,
        op: &O,
        y: &[f64],
    ) -> crate::error::Result<ReconResult> {
        match *self {
            SolverChoice::Omp { s_max, tol } => omp(op, y, s_max, tol),
            SolverChoice::Iht { s, max_iters, step } => iht(op, y, s, max_iters, step),
        }
    }
}

/// `‖x̂ − x‖ ≤ tol·‖x‖`; the criterion for exact recovery in the experiments.
pub fn recovered(estimate: &[f64], truth: &[f64], tol: f64) -> bool {
    let err: f64 = estimate.iter().zip(truth).map(|(a, b)| (a - b).powi(2)).sum();
    let norm: f64 = truth.iter().map(|v| v * v).sum();
    err.sqrt() <= tol * norm.sqrt()
}

/// Relative tolerance used to call a sparse recovery exact.
pub const EXACT_RECOVERY_TOL: f64 = 1e-4;
