//! Empirical and exact restricted-isometry constants.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Normalization, Scheme, SchemeConfig};
use crate::error::{Error, Result};
use crate::operators::linop::norm_sq;
use crate::operators::{build_operator, compute_pq, LinearOperator, StructuredOperator};
use crate::rng::derive;
use crate::signals::{DctPlan, SignalInstance, SignalSpec};

/// Empirical isometry constant over a finite signal set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RipEstimate {
    pub delta_hat: f64,
    /// `‖Φα‖² / ‖α‖²` per signal.
    pub ratios: Vec<f64>,
    pub p: usize,
    pub q: usize,
}

/// `max |‖Φα‖²/‖α‖² − 1|` over `signals`, using the unbiased scaling.
pub fn estimate_delta(op: &StructuredOperator, signals: &[SignalInstance]) -> Result<RipEstimate> {
    let mut ratios = Vec::with_capacity(signals.len());
    for sig in signals {
        let energy = norm_sq(&sig.values);
        if energy == 0.0 {
            return Err(Error::RejectedInput("zero signal in RIP estimate".into()));
        }
        let y = op.apply_with(&sig.values, Normalization::Unbiased)?;
        ratios.push(norm_sq(&y) / energy);
    }
    let delta_hat = ratios.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
    let (p, q) = compute_pq(op.permutation(), op.n());
    Ok(RipEstimate {
        delta_hat,
        ratios,
        p,
        q,
    })
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Largest enumeration [`exact_rip_delta`] accepts when `n > 32`.
pub const MAX_SUPPORTS: u128 = 1_000_000;

/// Exact isometry constant of order `s` by enumerating every support:
/// `max_S max(λ_max(Φ_Sᵀ Φ_S) − 1, 1 − λ_min(Φ_Sᵀ Φ_S))`.
pub fn exact_rip_delta(phi: &DMatrix<f64>, s: usize) -> Result<f64> {
    let n = phi.ncols();
    if s > n {
        return Err(Error::RejectedInput(format!("sparsity {s} exceeds n = {n}")));
    }
    if s == 0 {
        return Ok(0.0);
    }
    if n > 32 && binomial(n, s) > MAX_SUPPORTS {
        return Err(Error::EnumerationTooLarge { n, s });
    }
    let gram = phi.transpose() * phi;
    let mut support: Vec<usize> = (0..s).collect();
    let mut sub = DMatrix::<f64>::zeros(s, s);
    let mut worst = 0.0f64;
    loop {
        for (a, &i) in support.iter().enumerate() {
            for (b, &j) in support.iter().enumerate() {
                sub[(a, b)] = gram[(i, j)];
            }
        }
        let eig = SymmetricEigen::new(sub.clone()).eigenvalues;
        let hi = eig.max();
        let lo = eig.min();
        worst = worst.max(hi - 1.0).max(1.0 - lo);
        if !next_combination(&mut support, n) {
            break;
        }
    }
    Ok(worst)
}

/// Advances a sorted index combination in lexicographic order.
pub fn next_combination(comb: &mut [usize], n: usize) -> bool {
    let k = comb.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if comb[i] < n - k + i {
            comb[i] += 1;
            for j in i + 1..k {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// `δ* = max_i δ_i` over the effective blocks `D_i Φ^B_i` (with their
/// sub-signal scale, under the operator's normalization) at sparsity `s_star`.
pub fn block_delta_star(op: &StructuredOperator, s_star: usize) -> Result<f64> {
    let norm = op.config().normalization;
    let mut worst = 0.0f64;
    for i in 0..op.c() {
        worst = worst.max(exact_rip_delta(&op.effective_block(i, norm), s_star)?);
    }
    Ok(worst)
}

/// Outcome of checking the block-wise isometry bound
/// `(p/q)(1−δ*)‖α‖² ≤ ‖Φα‖²/q ≤ (1+δ*)‖α‖²` on a signal set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub holds: bool,
    pub p: usize,
    pub q: usize,
    pub delta_star: f64,
    pub signals: usize,
    pub lower_violations: usize,
    pub upper_violations: usize,
    /// Smallest observed `‖Φα‖²/(q‖α‖²)` and largest, over nonzero signals.
    pub min_ratio: f64,
    pub max_ratio: f64,
}

/// Checks every signal against the bound implied by per-block constant `delta_star`.
/// `‖Φα‖²` is taken without the global `1/√b`, so the explicit `1/q` is the only global factor.
pub fn check_block_bound(
    op: &StructuredOperator,
    signals: &[SignalInstance],
    delta_star: f64,
) -> Result<BoundReport> {
    let norm = op.config().normalization;
    let (p, q) = compute_pq(op.permutation(), op.n());
    if p == 0 {
        return Err(Error::RejectedInput("operator drops samples (p = 0)".into()));
    }
    let g2 = op.global_scale(norm).powi(2);
    let (pf, qf) = (p as f64, q as f64);
    let mut report = BoundReport {
        holds: true,
        p,
        q,
        delta_star,
        signals: signals.len(),
        lower_violations: 0,
        upper_violations: 0,
        min_ratio: f64::INFINITY,
        max_ratio: f64::NEG_INFINITY,
    };
    for sig in signals {
        let energy = norm_sq(&sig.values);
        let measured = norm_sq(&op.apply(&sig.values)?) / g2 / qf;
        let tol = 1e-12 * energy;
        if measured < pf / qf * (1.0 - delta_star) * energy - tol {
            report.lower_violations += 1;
        }
        if measured > (1.0 + delta_star) * energy + tol {
            report.upper_violations += 1;
        }
        if energy > 0.0 {
            report.min_ratio = report.min_ratio.min(measured / energy);
            report.max_ratio = report.max_ratio.max(measured / energy);
        }
    }
    report.holds = report.lower_violations == 0 && report.upper_violations == 0;
    Ok(report)
}

/// Fraction of trial matrices with `delta_hat ≤ δ`, per grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SatisfactionCurve {
    pub delta_grid: Vec<f64>,
    pub fraction_satisfying: Vec<f64>,
}

impl SatisfactionCurve {
    pub fn from_deltas(delta_hats: &[f64], delta_grid: &[f64]) -> Self {
        let trials = delta_hats.len().max(1) as f64;
        let fraction_satisfying = delta_grid
            .iter()
            .map(|&d| delta_hats.iter().filter(|&&h| h <= d).count() as f64 / trials)
            .collect();
        SatisfactionCurve {
            delta_grid: delta_grid.to_vec(),
            fraction_satisfying,
        }
    }

    /// Curve value at the grid point closest to `delta`.
    pub fn at(&self, delta: f64) -> f64 {
        let (i, _) = self
            .delta_grid
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - delta).abs().total_cmp(&(b.1 - delta).abs()))
            .expect("non-empty grid");
        self.fraction_satisfying[i]
    }
}

/// `0.02, 0.04, …, 0.98`.
pub fn default_delta_grid() -> Vec<f64> {
    (1..50).map(|k| k as f64 * 0.02).collect()
}

/// One sweep over schemes × block sizes × measurement counts.
#[derive(Debug, Clone, Serialize)]
pub struct SweepSpec {
    pub schemes: Vec<Scheme>,
    pub n: usize,
    pub block_sizes: Vec<usize>,
    pub measurements: Vec<usize>,
    /// Passes used for RSRM entries (other schemes always use one).
    pub passes: usize,
    pub signal: SignalSpec,
    pub trials: usize,
    pub signals_per_trial: usize,
    pub delta_grid: Vec<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepCurve {
    pub scheme: Scheme,
    pub n: usize,
    pub block_size: usize,
    pub m: usize,
    pub passes: usize,
    pub delta_hats: Vec<f64>,
    pub curve: SatisfactionCurve,
}

impl SweepSpec {
    /// Resolved scheme configurations, in output order.
    pub fn configs(&self) -> Vec<SchemeConfig> {
        let mut out = Vec::new();
        for &scheme in &self.schemes {
            let blocks: Vec<usize> = if scheme == Scheme::FullGrm {
                vec![self.n]
            } else {
                self.block_sizes.clone()
            };
            for &nb in &blocks {
                for &m in &self.measurements {
                    let passes = if scheme == Scheme::Rsrm { self.passes } else { 1 };
                    out.push(SchemeConfig::new(scheme, self.n, nb, 0.0, passes).with_measurements(m));
                }
            }
        }
        out
    }
}

/// Runs the satisfaction protocol: every trial draws a fresh operator per
/// configuration and a fresh signal set (shared by all configurations of that
/// trial), records `delta_hat`, and the curve reports the fraction of trials
/// whose matrix satisfies the bound for all signals.
pub fn satisfaction_sweep(spec: &SweepSpec) -> Result<Vec<SweepCurve>> {
    let configs = spec.configs();
    for cfg in &configs {
        cfg.validate()?;
    }
    let plan = matches!(spec.signal, SignalSpec::Compressible { .. }).then(|| DctPlan::new(spec.n));
    let per_trial: Vec<Vec<f64>> = (0..spec.trials)
        .into_par_iter()
        .map(|t| -> Result<Vec<f64>> {
            let trial_seed = derive(spec.seed, t as u64);
            let signal_seed = derive(trial_seed, 0x5167);
            let signals = (0..spec.signals_per_trial)
                .map(|k| spec.signal.generate_with(plan.as_ref(), spec.n, derive(signal_seed, k as u64)))
                .collect::<Result<Vec<_>>>()?;
            configs
                .iter()
                .enumerate()
                .map(|(ci, cfg)| {
                    let master = derive(derive(trial_seed, 0x0b), ci as u64);
                    let op = build_operator(&cfg.clone().with_master_seed(master))?;
                    Ok(estimate_delta(&op, &signals)?.delta_hat)
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(configs
        .iter()
        .enumerate()
        .map(|(ci, cfg)| {
            let delta_hats: Vec<f64> = per_trial.iter().map(|row| row[ci]).collect();
            SweepCurve {
                scheme: cfg.scheme,
                n: cfg.n,
                block_size: cfg.block_size,
                m: cfg.measurements(),
                passes: cfg.passes,
                curve: SatisfactionCurve::from_deltas(&delta_hats, &spec.delta_grid),
                delta_hats,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signals::gen_random_sparse;

    fn sparse_set(n: usize, s: usize, count: usize, seed: u64) -> Vec<SignalInstance> {
        (0..count)
            .map(|k| gen_random_sparse(n, s, derive(seed, k as u64)).unwrap())
            .collect()
    }

    #[test]
    fn square_orthonormal_is_isometry() {
        let op = build_operator(&SchemeConfig::full_grm(32, 1.0)).unwrap();
        let est = estimate_delta(&op, &sparse_set(32, 5, 50, 1)).unwrap();
        assert!(est.delta_hat <= 1e-10);
        assert_eq!((est.p, est.q), (1, 1));
    }

    #[test]
    fn matches_direct_recomputation() {
        let op = build_operator(&SchemeConfig::new(Scheme::Rsrm, 64, 16, 0.25, 1)).unwrap();
        let signals = sparse_set(64, 4, 500, 2);
        let est = estimate_delta(&op, &signals).unwrap();
        let dense = op.densify().unwrap();
        let oracle = signals
            .iter()
            .map(|s| {
                let x = nalgebra::DVector::from_column_slice(&s.values);
                ((&dense * &x).norm_squared() / x.norm_squared() - 1.0).abs()
            })
            .fold(0.0, f64::max);
        assert!((est.delta_hat - oracle).abs() < 1e-12);
    }

    #[test]
    fn rejects_zero_signal() {
        let op = build_operator(&SchemeConfig::full_grm(8, 0.5)).unwrap();
        let zero = SignalInstance::external(vec![0.0; 8]);
        assert!(matches!(estimate_delta(&op, &[zero]), Err(Error::RejectedInput(_))));
    }

    #[test]
    fn union_is_max() {
        let op = build_operator(&SchemeConfig::new(Scheme::Bcs, 64, 16, 0.25, 1)).unwrap();
        let a = sparse_set(64, 3, 40, 3);
        let b = sparse_set(64, 3, 40, 4);
        let ab: Vec<_> = a.iter().chain(&b).cloned().collect();
        let da = estimate_delta(&op, &a).unwrap().delta_hat;
        let db = estimate_delta(&op, &b).unwrap().delta_hat;
        assert_eq!(estimate_delta(&op, &ab).unwrap().delta_hat, da.max(db));
    }

    #[test]
    fn exact_identity_and_duplicate_columns() {
        assert_eq!(exact_rip_delta(&DMatrix::identity(6, 6), 3).unwrap(), 0.0);
        let dup = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 0.0]);
        assert!((exact_rip_delta(&dup, 2).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_is_monotone_in_sparsity() {
        let op = build_operator(&SchemeConfig::full_grm(12, 0.5).with_master_seed(5)).unwrap();
        let dense = op.densify().unwrap();
        let mut prev = 0.0;
        for s in 1..=6 {
            let d = exact_rip_delta(&dense, s).unwrap();
            assert!(d >= prev - 1e-12);
            prev = d;
        }
    }

    #[test]
    fn exact_refuses_huge_enumeration() {
        let phi = DMatrix::<f64>::zeros(2, 200);
        assert!(matches!(exact_rip_delta(&phi, 5), Err(Error::EnumerationTooLarge { .. })));
        assert!(exact_rip_delta(&phi, 2).is_ok());
    }

    #[test]
    fn combinations_enumerate_all() {
        let mut c = vec![0, 1];
        let mut count = 1;
        while next_combination(&mut c, 12) {
            count += 1;
        }
        assert_eq!(count, 66);
        assert_eq!(binomial(12, 2), 66);
        assert_eq!(binomial(3, 5), 0);
    }

    #[test]
    fn bound_holds_and_understated_constant_is_caught() {
        let cfg = SchemeConfig::new(Scheme::Rsrm, 32, 8, 0.75, 1).with_master_seed(9);
        let op = build_operator(&cfg).unwrap();
        let delta_star = block_delta_star(&op, 2).unwrap();
        let signals = sparse_set(32, 2, 1000, 10);
        let rep = check_block_bound(&op, &signals, delta_star).unwrap();
        assert!(rep.holds, "{rep:?}");
        let rep = check_block_bound(&op, &signals, delta_star / 2.0).unwrap();
        assert!(!rep.holds);
        let zero = SignalInstance::external(vec![0.0; 32]);
        assert!(check_block_bound(&op, &[zero], delta_star).unwrap().holds);
    }

    #[test]
    fn curve_from_deltas() {
        let grid = default_delta_grid();
        assert_eq!(grid.len(), 49);
        let c = SatisfactionCurve::from_deltas(&[0.1, 0.5, 0.5, 2.0], &grid);
        assert_eq!(c.at(0.5), 0.75);
        assert_eq!(c.at(0.08), 0.0);
        assert_eq!(c.at(0.98), 0.75);
        assert!(c.fraction_satisfying.windows(2).all(|w| w[0] <= w[1]));
        let single = SatisfactionCurve::from_deltas(&[0.37], &grid);
        let jumps = single.fraction_satisfying.windows(2).filter(|w| w[0] != w[1]).count();
        assert_eq!(jumps, 1);
    }

    #[test]
    fn sweep_is_deterministic() {
        let spec = SweepSpec {
            schemes: vec![Scheme::Bcs, Scheme::Rsrm],
            n: 64,
            block_sizes: vec![16],
            measurements: vec![16],
            passes: 1,
            signal: SignalSpec::RandomSparse { s: 3 },
            trials: 6,
            signals_per_trial: 20,
            delta_grid: default_delta_grid(),
            seed: 4,
        };
        let a = satisfaction_sweep(&spec).unwrap();
        let b = satisfaction_sweep(&spec).unwrap();
        assert_eq!(a.len(), 2);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.delta_hats, y.delta_hats);
            assert!(x.curve.fraction_satisfying.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
