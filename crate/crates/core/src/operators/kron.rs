use nalgebra::DMatrix;

use super::linop::LinearOperator;
use super::structured::StructuredOperator;
use crate::error::{Error, Result};

/// Separable 2D sampling `Y = Φ_L · X · Φ_Rᵀ`.
#[derive(Debug, Clone)]
pub struct KroneckerOperator {
    pub left: StructuredOperator,
    pub right: StructuredOperator,
}

impl KroneckerOperator {
    pub fn new(left: StructuredOperator, right: StructuredOperator) -> Self {
        KroneckerOperator { left, right }
    }

    /// Signal shape `(rows, cols)`.
    pub fn signal_shape(&self) -> (usize, usize) {
        (self.left.n(), self.right.n())
    }

    /// Measurement shape `(m_L, m_R)`.
    pub fn measurement_shape(&self) -> (usize, usize) {
        (self.left.m(), self.right.m())
    }

    fn check(&self, x: &DMatrix<f64>, expected: (usize, usize)) -> Result<()> {
        if x.shape() != expected {
            let got = if x.nrows() != expected.0 { x.nrows() } else { x.ncols() };
            let want = if x.nrows() != expected.0 { expected.0 } else { expected.1 };
            return Err(Error::Dimension { expected: want, got });
        }
        Ok(())
    }

    /// Left operator on every column, then right operator on every row.
    pub fn apply(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.check(x, self.signal_shape())?;
        let half = map_columns(x, &self.left, false);
        Ok(map_rows(&half, &self.right, false))
    }

    /// Right operator on every row first, then left on every column.
    pub fn apply_rows_first(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.check(x, self.signal_shape())?;
        let half = map_rows(x, &self.right, false);
        Ok(map_columns(&half, &self.left, false))
    }

    /// `Φ_Lᵀ · Y · Φ_R`.
    pub fn adjoint(&self, y: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.check(y, self.measurement_shape())?;
        let half = map_columns(y, &self.left, true);
        Ok(map_rows(&half, &self.right, true))
    }
}

/// Applies `op` (or its adjoint) to each column.
fn map_columns<O: LinearOperator>(x: &DMatrix<f64>, op: &O, adjoint: bool) -> DMatrix<f64> {
    let out_rows = if adjoint { op.cols() } else { op.rows() };
    let mut out = DMatrix::zeros(out_rows, x.ncols());
    let mut buf = vec![0.0; out_rows];
    for j in 0..x.ncols() {
        let col = x.column(j);
        let input = col.as_slice();
        if adjoint {
            op.adjoint_into(input, &mut buf);
        } else {
            op.apply_into(input, &mut buf);
        }
        out.column_mut(j).copy_from_slice(&buf);
    }
    out
}

/// Applies `op` (or its adjoint) to each row.
fn map_rows<O: LinearOperator>(x: &DMatrix<f64>, op: &O, adjoint: bool) -> DMatrix<f64> {
    let t = x.transpose();
    map_columns(&t, op, adjoint).transpose()
}

/// Free-function form of [`KroneckerOperator::apply`].
pub fn kron_apply(kop: &KroneckerOperator, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    kop.apply(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Scheme, SchemeConfig};
    use crate::operators::build_operator;
    use crate::rng::rng_from_seed;
    use rand::Rng as _;
    use rand_distr::StandardNormal;

    fn random_matrix(r: usize, c: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = rng_from_seed(seed);
        DMatrix::from_fn(r, c, |_, _| rng.sample(StandardNormal))
    }

    fn rel_err(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn zero_image() {
        let l = build_operator(&SchemeConfig::full_grm(16, 0.5)).unwrap();
        let r = build_operator(&SchemeConfig::full_grm(8, 0.5)).unwrap();
        let k = KroneckerOperator::new(l, r);
        let y = k.apply(&DMatrix::zeros(16, 8)).unwrap();
        assert_eq!(y.shape(), (8, 4));
        assert!(y.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn matches_dense_product_full() {
        let l = build_operator(&SchemeConfig::full_grm(32, 0.5).with_master_seed(1)).unwrap();
        let r = build_operator(&SchemeConfig::full_grm(32, 0.25).with_master_seed(2)).unwrap();
        let (dl, dr) = (l.densify().unwrap(), r.densify().unwrap());
        let k = KroneckerOperator::new(l, r);
        let x = random_matrix(32, 32, 3);
        let dense = &dl * &x * dr.transpose();
        assert!(rel_err(&k.apply(&x).unwrap(), &dense) < 1e-10);
    }

    #[test]
    fn order_of_application_irrelevant_and_adjoint() {
        let l = build_operator(&SchemeConfig::new(Scheme::Rsrm, 64, 16, 0.5, 2)).unwrap();
        let r = build_operator(&SchemeConfig::new(Scheme::Bcs, 32, 8, 0.5, 1)).unwrap();
        let k = KroneckerOperator::new(l, r);
        let x = random_matrix(64, 32, 5);
        let a = k.apply(&x).unwrap();
        let b = k.apply_rows_first(&x).unwrap();
        assert!(rel_err(&a, &b) < 1e-12);
        let y = random_matrix(32, 16, 6);
        let lhs = a.dot(&y);
        let rhs = x.dot(&k.adjoint(&y).unwrap());
        assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0));
    }

    #[test]
    fn shape_mismatch() {
        let l = build_operator(&SchemeConfig::full_grm(16, 0.5)).unwrap();
        let k = KroneckerOperator::new(l.clone(), l);
        assert!(matches!(k.apply(&DMatrix::zeros(16, 15)), Err(Error::Dimension { .. })));
    }
}
