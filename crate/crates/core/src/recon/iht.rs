use crate::error::{Error, Result};
use crate::operators::linop::{norm, LinearOperator};

use super::ReconResult;

/// Keeps the `s` largest-magnitude entries (ties broken toward lower index).
pub fn hard_threshold(x: &mut [f64], s: usize) {
    if s >= x.len() {
        return;
    }
    if s == 0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return;
    }
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.select_nth_unstable_by(s - 1, |&a, &b| x[b].abs().total_cmp(&x[a].abs()).then(a.cmp(&b)));
    for &k in &order[s..] {
        x[k] = 0.0;
    }
}

const MAX_HALVINGS: usize = 40;

/// Iterative hard thresholding `x ← H_s(x + μ·Aᵀ(y − Ax))`.
///
/// Each iteration starts from `μ = step` and halves it until the residual
/// does not increase. Stops after `max_iters` or when the residual changes by
/// less than `1e-8·‖y‖`.
pub fn iht<O: LinearOperator + ?Sized>(
    op: &O,
    y: &[f64],
    s: usize,
    max_iters: usize,
    step: f64,
) -> Result<ReconResult> {
    let (m, n) = (op.rows(), op.cols());
    if y.len() != m {
        return Err(Error::Dimension { expected: m, got: y.len() });
    }
    if s > n {
        return Err(Error::InvalidConfig(format!("s = {s} exceeds n = {n}")));
    }
    let y_norm = norm(y);
    let mut x = vec![0.0; n];
    let mut residual = y.to_vec();
    let mut res_norm = y_norm;
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut grad = vec![0.0; n];
    let mut cand = vec![0.0; n];
    let mut cand_res = vec![0.0; m];
    if y_norm > 0.0 {
        for _ in 0..max_iters {
            op.adjoint_into(&residual, &mut grad);
            let mut mu = step;
            let mut accepted = None;
            for _ in 0..MAX_HALVINGS {
                for ((c, &xi), &g) in cand.iter_mut().zip(&x).zip(&grad) {
                    *c = xi + mu * g;
                }
                hard_threshold(&mut cand, s);
                op.apply_into(&cand, &mut cand_res);
                for (r, &yi) in cand_res.iter_mut().zip(y) {
                    *r = yi - *r;
                }
                let r = norm(&cand_res);
                if r > 10.0 * y_norm {
                    return Err(Error::Diverged { initial: y_norm, current: r });
                }
                if r <= res_norm {
                    accepted = Some(r);
                    break;
                }
                mu *= 0.5;
            }
            iterations += 1;
            let Some(new_norm) = accepted else {
                history.push(res_norm);
                break;
            };
            std::mem::swap(&mut x, &mut cand);
            std::mem::swap(&mut residual, &mut cand_res);
            let change = res_norm - new_norm;
            res_norm = new_norm;
            history.push(res_norm);
            if change < 1e-8 * y_norm {
                break;
            }
        }
    }
    let support: Vec<usize> = (0..n).filter(|&k| x[k] != 0.0).collect();
    Ok(ReconResult {
        estimate: x,
        shape: None,
        iterations,
        residual: res_norm,
        support: Some(support),
        converged: res_norm <= 1e-6 * y_norm,
        history,
    })
}
