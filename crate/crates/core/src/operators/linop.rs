use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// A real linear map `R^cols → R^rows` with an exact adjoint.
pub trait LinearOperator: Sync {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;

    /// `y ← A x`. Slices must already have the right lengths.
    fn apply_into(&self, x: &[f64], y: &mut [f64]);

    /// `x ← Aᵀ y`. Slices must already have the right lengths.
    fn adjoint_into(&self, y: &[f64], x: &mut [f64]);

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.cols(), x.len())?;
        let mut y = vec![0.0; self.rows()];
        self.apply_into(x, &mut y);
        Ok(y)
    }

    fn adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len(self.rows(), y.len())?;
        let mut x = vec![0.0; self.cols()];
        self.adjoint_into(y, &mut x);
        Ok(x)
    }

    /// Column `k`, i.e. `A e_k`.
    fn column(&self, k: usize) -> Vec<f64> {
        let mut e = vec![0.0; self.cols()];
        e[k] = 1.0;
        let mut y = vec![0.0; self.rows()];
        self.apply_into(&e, &mut y);
        y
    }
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::Dimension { expected, got });
    }
    Ok(())
}

/// A dense matrix as an operator.
#[derive(Debug, Clone)]
pub struct DenseOperator(pub DMatrix<f64>);

impl LinearOperator for DenseOperator {
    fn rows(&self) -> usize {
        self.0.nrows()
    }

    fn cols(&self) -> usize {
        self.0.ncols()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        for (t, out) in y.iter_mut().enumerate() {
            *out = self.0.row(t).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    fn adjoint_into(&self, y: &[f64], x: &mut [f64]) {
        for (k, out) in x.iter_mut().enumerate() {
            *out = self.0.column(k).iter().zip(y).map(|(a, b)| a * b).sum();
        }
    }
}

/// Keeps only the listed measurement rows of an operator (measurement erasure).
pub struct RowSubset<'a, O: LinearOperator + ?Sized> {
    inner: &'a O,
    kept: Vec<usize>,
}

impl<'a, O: LinearOperator + ?Sized> RowSubset<'a, O> {
    pub fn new(inner: &'a O, mut kept: Vec<usize>) -> Result<Self> {
        kept.sort_unstable();
        kept.dedup();
        if let Some(&last) = kept.last() {
            if last >= inner.rows() {
                return Err(Error::Dimension {
                    expected: inner.rows(),
                    got: last + 1,
                });
            }
        }
        Ok(RowSubset { inner, kept })
    }

    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    /// Restricts a full measurement vector to the kept rows.
    pub fn restrict(&self, y: &[f64]) -> Vec<f64> {
        self.kept.iter().map(|&t| y[t]).collect()
    }
}

impl<O: LinearOperator + ?Sized> LinearOperator for RowSubset<'_, O> {
    fn rows(&self) -> usize {
        self.kept.len()
    }

    fn cols(&self) -> usize {
        self.inner.cols()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        let mut full = vec![0.0; self.inner.rows()];
        self.inner.apply_into(x, &mut full);
        for (out, &t) in y.iter_mut().zip(&self.kept) {
            *out = full[t];
        }
    }

    fn adjoint_into(&self, y: &[f64], x: &mut [f64]) {
        let mut full = vec![0.0; self.inner.rows()];
        for (&v, &t) in y.iter().zip(&self.kept) {
            full[t] = v;
        }
        self.inner.adjoint_into(&full, x);
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

pub fn norm_sq(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}
