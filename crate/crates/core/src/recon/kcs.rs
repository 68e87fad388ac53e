use nalgebra::DMatrix;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::KroneckerOperator;
use crate::rng::rng_from_seed;
use crate::signals::Dct2Plan;

use super::ReconResult;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KcsOptions {
    /// Soft-threshold level on 2D-DCT coefficients.
    pub lambda: f64,
    pub max_iters: usize,
    /// Stop once an accepted step lowers the objective by less than this fraction.
    pub tol: f64,
}

impl Default for KcsOptions {
    fn default() -> Self {
        KcsOptions {
            lambda: 1.0,
            max_iters: 300,
            tol: 1e-9,
        }
    }
}

fn soft(c: &DMatrix<f64>, t: f64) -> DMatrix<f64> {
    c.map(|v| v.signum() * (v.abs() - t).max(0.0))
}

struct Problem<'a> {
    kop: &'a KroneckerOperator,
    y: &'a DMatrix<f64>,
    mask: Option<&'a DMatrix<bool>>,
    dct: Dct2Plan,
    lambda: f64,
}

impl Problem<'_> {
    /// `M∘(Φ_L X Φ_Rᵀ − Y)` with `X` the inverse DCT of `c`.
    fn residual(&self, c: &DMatrix<f64>) -> DMatrix<f64> {
        let x = self.dct.inverse(c);
        let mut r = self.kop.apply(&x).expect("shape checked") - self.y;
        if let Some(mask) = self.mask {
            r.zip_apply(mask, |v, keep| {
                if !keep {
                    *v = 0.0;
                }
            });
        }
        r
    }

    fn gradient(&self, r: &DMatrix<f64>) -> DMatrix<f64> {
        self.dct.forward(&self.kop.adjoint(r).expect("shape checked"))
    }

    fn objective(&self, c: &DMatrix<f64>, r: &DMatrix<f64>) -> f64 {
        0.5 * r.norm_squared() + self.lambda * c.iter().map(|v| v.abs()).sum::<f64>()
    }
}

/// Largest eigenvalue of the separable normal operator, by power iteration.
fn lipschitz(kop: &KroneckerOperator) -> f64 {
    let (r, c) = kop.signal_shape();
    let mut rng = rng_from_seed(0x004b_4353);
    let mut v = DMatrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0));
    let mut est = 0.0;
    for _ in 0..50 {
        let nv = v.norm();
        if nv == 0.0 {
            break;
        }
        v /= nv;
        v = kop.adjoint(&kop.apply(&v).expect("shape")).expect("shape");
        est = v.norm();
    }
    est
}

/// Recovers `X` from `Y = Φ_L X Φ_Rᵀ` (entries with `mask = false` are treated
/// as erased) by minimizing `½‖M∘(Φ_L X Φ_Rᵀ − Y)‖²_F + λ‖DCT2(X)‖₁`.
///
/// Proximal gradient in the DCT domain with monotone momentum: each step takes
/// a gradient step of length `1/L` on the data term and soft-thresholds the
/// coefficients at `λ/L`; a candidate that raises the objective is not
/// accepted, so the recorded objective never increases.
pub fn kcs_recover(
    y: &DMatrix<f64>,
    kop: &KroneckerOperator,
    options: &KcsOptions,
    mask: Option<&DMatrix<bool>>,
) -> Result<ReconResult> {
    let expected = kop.measurement_shape();
    if y.shape() != expected {
        return Err(Error::Dimension {
            expected: expected.0 * expected.1,
            got: y.len(),
        });
    }
    if let Some(mask) = mask {
        if mask.shape() != expected {
            return Err(Error::Dimension {
                expected: expected.0 * expected.1,
                got: mask.len(),
            });
        }
    }
    if options.lambda < 0.0 {
        return Err(Error::InvalidConfig("lambda must be non-negative".into()));
    }
    let (rows, cols) = kop.signal_shape();
    let problem = Problem {
        kop,
        y,
        mask,
        dct: Dct2Plan::new(rows, cols),
        lambda: options.lambda,
    };
    let mut result = ReconResult {
        estimate: vec![0.0; rows * cols],
        shape: Some((rows, cols)),
        iterations: 0,
        residual: 0.0,
        support: None,
        converged: true,
        history: Vec::new(),
    };
    let zero = DMatrix::<f64>::zeros(rows, cols);
    let r0 = problem.residual(&zero);
    let y_norm = r0.norm();
    result.residual = y_norm;
    if y_norm == 0.0 {
        return Ok(result);
    }
    let lip = lipschitz(kop) * 1.01;
    if lip == 0.0 {
        return Err(Error::RejectedInput("operator has no range".into()));
    }
    let step = 1.0 / lip;

    let mut current = zero.clone();
    let mut current_obj = problem.objective(&zero, &r0);
    let mut momentum = zero;
    let mut t = 1.0f64;
    result.converged = false;
    for _ in 0..options.max_iters {
        let rz = problem.residual(&momentum);
        let grad = problem.gradient(&rz);
        let cand = soft(&(&momentum - grad * step), options.lambda * step);
        let rc = problem.residual(&cand);
        let cand_obj = problem.objective(&cand, &rc);
        if !cand_obj.is_finite() || rc.norm() > 10.0 * y_norm {
            return Err(Error::Diverged {
                initial: y_norm,
                current: rc.norm(),
            });
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        result.iterations += 1;
        if cand_obj <= current_obj {
            let decrease = current_obj - cand_obj;
            momentum = &cand + (&cand - &current) * ((t - 1.0) / t_next);
            current = cand;
            let prev = current_obj;
            current_obj = cand_obj;
            result.history.push(current_obj);
            if decrease <= options.tol * prev {
                result.converged = true;
                break;
            }
        } else {
            momentum = &current + (&cand - &current) * (t / t_next);
            result.history.push(current_obj);
        }
        t = t_next;
    }
    result.residual = problem.residual(&current).norm();
    result.estimate = problem.dct.inverse(&current).as_slice().to_vec();
    Ok(result)
}
