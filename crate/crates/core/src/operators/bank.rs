use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::rng::Rng;

/// Dense block with orthonormal rows, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthoBlock {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl OrthoBlock {
    /// Gaussian random matrix with its rows orthonormalized.
    ///
    /// Draws a `cols × rows` standard normal matrix, takes its thin QR factor
    /// and flips column signs so `diag(R) > 0`; the transposed `Q` is Haar
    /// distributed on the Stiefel manifold.
    pub fn gaussian(rows: usize, cols: usize, rng: &mut Rng) -> Self {
        assert!(rows <= cols, "a block cannot have more orthonormal rows than columns");
        let g = DMatrix::<f64>::from_fn(cols, rows, |_, _| StandardNormal.sample(rng));
        let qr = g.qr();
        let mut q = qr.q();
        let r = qr.r();
        for j in 0..rows {
            if r[(j, j)] < 0.0 {
                q.column_mut(j).neg_mut();
            }
        }
        // Row t of the block is column t of Q.
        let mut data = Vec::with_capacity(rows * cols);
        for t in 0..rows {
            data.extend(q.column(t).iter());
        }
        OrthoBlock { rows, cols, data }
    }

    #[inline]
    pub fn row(&self, t: usize) -> &[f64] {
        &self.data[t * self.cols..(t + 1) * self.cols]
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    /// `max |B·Bᵀ − I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..self.rows {
            for b in a..self.rows {
                let dot: f64 = self.row(a).iter().zip(self.row(b)).map(|(u, v)| u * v).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

/// `d` orthonormal blocks and the sub-signal → block assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthoBlockBank {
    pub blocks: Vec<OrthoBlock>,
    pub assignment: Vec<usize>,
}

impl OrthoBlockBank {
    pub fn block_for(&self, sub_signal: usize) -> &OrthoBlock {
        &self.blocks[self.assignment[sub_signal]]
    }
}
