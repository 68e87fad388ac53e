//! Orthonormal DCT-II, computed directly from a cached basis.

use nalgebra::DMatrix;

/// Cached orthonormal DCT-II basis of length `n`.
#[derive(Debug, Clone)]
pub struct DctPlan {
    n: usize,
    /// Row `k` is the `k`-th basis vector.
    basis: Vec<f64>,
}

impl DctPlan {
    pub fn new(n: usize) -> Self {
        let mut basis = Vec::with_capacity(n * n);
        let nf = n as f64;
        for k in 0..n {
            let w = if k == 0 { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
            for i in 0..n {
                let arg = std::f64::consts::PI * (2 * i + 1) as f64 * k as f64 / (2.0 * nf);
                basis.push(w * arg.cos());
            }
        }
        DctPlan { n, basis }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        self.basis
            .chunks(self.n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn inverse(&self, coeffs: &[f64]) -> Vec<f64> {
        assert_eq!(coeffs.len(), self.n);
        let mut x = vec![0.0; self.n];
        for (row, &c) in self.basis.chunks(self.n).zip(coeffs) {
            if c != 0.0 {
                for (xi, &b) in x.iter_mut().zip(row) {
                    *xi += c * b;
                }
            }
        }
        x
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.basis)
    }
}

pub fn dct_forward(x: &[f64]) -> Vec<f64> {
    DctPlan::new(x.len()).forward(x)
}

pub fn dct_inverse(c: &[f64]) -> Vec<f64> {
    DctPlan::new(c.len()).inverse(c)
}

/// Separable 2D DCT with cached row and column bases.
#[derive(Debug, Clone)]
pub struct Dct2Plan {
    rows: DMatrix<f64>,
    cols: DMatrix<f64>,
}

impl Dct2Plan {
    pub fn new(rows: usize, cols: usize) -> Self {
        Dct2Plan {
            rows: DctPlan::new(rows).matrix(),
            cols: DctPlan::new(cols).matrix(),
        }
    }

    pub fn forward(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        &self.rows * x * self.cols.transpose()
    }

    pub fn inverse(&self, c: &DMatrix<f64>) -> DMatrix<f64> {
        self.rows.transpose() * c * &self.cols
    }
}

pub fn dct2_forward(x: &DMatrix<f64>) -> DMatrix<f64> {
    Dct2Plan::new(x.nrows(), x.ncols()).forward(x)
}

pub fn dct2_inverse(c: &DMatrix<f64>) -> DMatrix<f64> {
    Dct2Plan::new(c.nrows(), c.ncols()).inverse(c)
}
