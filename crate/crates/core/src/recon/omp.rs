use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::operators::linop::{norm, LinearOperator};

use super::ReconResult;

/// Orthogonal matching pursuit.
///
/// Each iteration adds the column most correlated with the residual
/// (`argmax |Aᵀ r|`) and refits the coefficients on the whole support by
/// least squares. Stops after `s_max` atoms or once `‖r‖ < tol·‖y‖`.
pub fn omp<O: LinearOperator + ?Sized>(
    op: &O,
    y: &[f64],
    s_max: usize,
    tol: f64,
) -> Result<ReconResult> {
    let (m, n) = (op.rows(), op.cols());
    if y.len() != m {
        return Err(Error::Dimension { expected: m, got: y.len() });
    }
    if s_max > m {
        return Err(Error::InvalidConfig(format!("s_max = {s_max} exceeds m = {m}")));
    }
    let y_norm = norm(y);
    let mut result = ReconResult {
        estimate: vec![0.0; n],
        shape: None,
        iterations: 0,
        residual: y_norm,
        support: Some(Vec::new()),
        converged: y_norm == 0.0,
        history: Vec::new(),
    };
    if y_norm == 0.0 {
        return Ok(result);
    }
    let yv = DVector::from_column_slice(y);
    let mut residual = y.to_vec();
    let mut support: Vec<usize> = Vec::new();
    let mut columns: Vec<f64> = Vec::new();
    let mut corr = vec![0.0; n];
    while support.len() < s_max && norm(&residual) >= tol * y_norm {
        op.adjoint_into(&residual, &mut corr);
        let pick = corr
            .iter()
            .enumerate()
            .filter(|(k, _)| !support.contains(k))
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()));
        let Some((k, &c)) = pick else { break };
        if c == 0.0 {
            break;
        }
        support.push(k);
        columns.extend(op.column(k));
        let a = DMatrix::from_column_slice(m, support.len(), &columns);
        let qr = a.clone().qr();
        let r = qr.r();
        let diag_max = r.diagonal().amax();
        if r.diagonal().iter().any(|d| d.abs() <= 1e-10 * diag_max.max(f64::MIN_POSITIVE)) {
            result.support = Some(support[..support.len() - 1].to_vec());
            return Err(Error::NumericallySingular {
                support: support.len(),
                partial: Box::new(result),
            });
        }
        let rhs = qr.q().transpose() * &yv;
        let coef = r
            .solve_upper_triangular(&rhs)
            .expect("nonzero diagonal checked above");
        let fit = &a * &coef;
        for (r, (yi, fi)) in residual.iter_mut().zip(y.iter().zip(fit.iter())) {
            *r = yi - fi;
        }
        result.estimate.iter_mut().for_each(|v| *v = 0.0);
        for (&k, &c) in support.iter().zip(coef.iter()) {
            result.estimate[k] = c;
        }
        result.iterations = support.len();
        result.residual = norm(&residual);
        result.history.push(result.residual);
        result.support = Some(support.clone());
    }
    result.converged = result.residual < tol * y_norm;
    Ok(result)
}
