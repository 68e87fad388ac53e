//! Democracy and leakage analysis: how much of a signal's low-resolution
//! structure shows in per-block measurement energy, how correlated adjacent
//! measurements are, and how recovery degrades when measurements are lost.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Scheme, SchemeConfig};
use crate::error::{Error, Result};
use crate::operators::linop::norm_sq;
use crate::operators::{build_operator, KroneckerOperator, LinearOperator, RowSubset, StructuredOperator};
use crate::recon::{kcs_recover, psnr, recovered, KcsOptions, SolverChoice, EXACT_RECOVERY_TOL};
use crate::rng::{derive, rng_from_seed};
use crate::signals::SignalInstance;

/// Pearson correlation; errors when either side has zero variance.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            expected: a.len(),
            got: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::RejectedInput("correlation needs at least two samples".into()));
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    // relative test so rounding noise on a constant input still counts as constant
    let zero_var = |s: f64, m: f64| s <= 1e-24 * n * m.abs().max(1.0).powi(2);
    if zero_var(saa, ma) {
        return Err(Error::UndefinedCorrelation("first sequence"));
    }
    if zero_var(sbb, mb) {
        return Err(Error::UndefinedCorrelation("second sequence"));
    }
    Ok((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

/// Lag-1 Pearson correlation of `seq[t]` against `seq[t + 1]`.
pub fn adjacent_correlation(seq: &[f64]) -> Result<f64> {
    if seq.len() < 3 {
        return Err(Error::RejectedInput("adjacent correlation needs at least 3 samples".into()));
    }
    pearson(&seq[..seq.len() - 1], &seq[1..]).map_err(|e| match e {
        Error::UndefinedCorrelation(_) => Error::UndefinedCorrelation("sequence"),
        other => other,
    })
}

/// Flattens an image tile by tile (tiles in row-major order, pixels row-major
/// within a tile), so contiguous blocks of the vector are image tiles.
pub fn tile_vectorize(image: &DMatrix<f64>, tile: usize) -> Result<Vec<f64>> {
    let (rows, cols) = image.shape();
    if tile == 0 || rows % tile != 0 || cols % tile != 0 {
        return Err(Error::InvalidConfig(format!(
            "image {rows}x{cols} is not divisible into {tile}x{tile} tiles"
        )));
    }
    let mut out = Vec::with_capacity(rows * cols);
    for tr in 0..rows / tile {
        for tc in 0..cols / tile {
            for r in 0..tile {
                for c in 0..tile {
                    out.push(image[(tr * tile + r, tc * tile + c)]);
                }
            }
        }
    }
    Ok(out)
}

/// Per-tile mean-square intensity: the low-resolution reference image.
pub fn tile_mean_square(image: &DMatrix<f64>, tile: usize) -> Result<Vec<f64>> {
    let v = tile_vectorize(image, tile)?;
    let area = (tile * tile) as f64;
    Ok(v.chunks(tile * tile).map(|t| norm_sq(t) / area).collect())
}

/// Scheme configuration for leakage analysis of an image cut into
/// `tile × tile` blocks.
pub fn leakage_config(scheme: Scheme, shape: (usize, usize), tile: usize, subrate: f64) -> SchemeConfig {
    SchemeConfig::new(scheme, shape.0 * shape.1, tile * tile, subrate, 1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeakageReport {
    pub scheme: Scheme,
    /// `‖y_i‖²` per sub-signal.
    pub energy_map: Vec<f64>,
    /// Tile mean-square intensity, one entry per tile.
    pub reference: Vec<f64>,
    /// Pearson correlation of (pass-summed) energies with the reference.
    pub correlation: f64,
}

/// Samples the tile-ordered image with `config` and correlates per-sub-signal
/// measurement energy with the low-resolution reference. With `b > 1` passes
/// the energies of sub-signal `i` across passes are summed before correlating.
pub fn block_energy_leakage(config: &SchemeConfig, image: &DMatrix<f64>, tile: usize) -> Result<LeakageReport> {
    if config.n != image.len() || config.block_size != tile * tile {
        return Err(Error::InvalidConfig(format!(
            "leakage needs n = {} and block size {} for a {}x{} image with {tile}x{tile} tiles",
            image.len(),
            tile * tile,
            image.nrows(),
            image.ncols()
        )));
    }
    let x = tile_vectorize(image, tile)?;
    let reference = tile_mean_square(image, tile)?;
    let op = build_operator(config)?;
    let energy_map: Vec<f64> = op.sub_signal_measurements(&x)?.iter().map(|y| norm_sq(y)).collect();
    let tiles = reference.len();
    let mut folded = vec![0.0; tiles];
    for (i, e) in energy_map.iter().enumerate() {
        folded[i % tiles] += e;
    }
    let correlation = pearson(&folded, &reference).map_err(|e| match e {
        Error::UndefinedCorrelation(_) => Error::UndefinedCorrelation("image"),
        other => other,
    })?;
    Ok(LeakageReport {
        scheme: config.scheme,
        energy_map,
        reference,
        correlation,
    })
}

/// `max / min` of an energy map (infinite when some entry is zero).
pub fn energy_spread(energy_map: &[f64]) -> f64 {
    let max = energy_map.iter().copied().fold(f64::MIN, f64::max);
    let min = energy_map.iter().copied().fold(f64::MAX, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Renders an energy map as an 8-bit heat image, square when the length is a
/// perfect square and a single row otherwise.
pub fn energy_heat_image(energy_map: &[f64]) -> DMatrix<f64> {
    let len = energy_map.len();
    let side = (len as f64).sqrt().round() as usize;
    let (rows, cols) = if side * side == len { (side, side) } else { (1, len) };
    let max = energy_map.iter().copied().fold(0.0, f64::max);
    DMatrix::from_fn(rows, cols, |r, c| {
        let v = energy_map[r * cols + c];
        if max > 0.0 {
            (255.0 * v / max).round()
        } else {
            0.0
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErasureReport {
    pub fraction: f64,
    pub erased: usize,
    pub trials: usize,
    pub recovered: usize,
    pub rate: f64,
}

/// Indices of the measurements that survive erasing `floor(fraction·m)` of
/// them. The erased set for a smaller fraction is always a subset of the one
/// for a larger fraction under the same seed.
pub fn surviving_rows(m: usize, fraction: f64, seed: u64) -> Result<Vec<usize>> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::InvalidConfig(format!("erase fraction {fraction} must lie in [0, 1)")));
    }
    let erased = (fraction * m as f64 + 1e-9).floor() as usize;
    if erased >= m {
        return Err(Error::InvalidConfig("erasure would remove every measurement".into()));
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(&mut rng_from_seed(seed));
    let mut kept = order.split_off(erased);
    kept.sort_unstable();
    Ok(kept)
}

/// Exact-recovery rate when a random `fraction` of measurements (and the
/// matching operator rows) is deleted. Trial `t` uses `signals[t]` and an
/// erasure pattern drawn from `derive(seed, t)`.
pub fn erasure_robustness<O: LinearOperator + ?Sized>(
    op: &O,
    signals: &[SignalInstance],
    fraction: f64,
    solver: SolverChoice,
    seed: u64,
) -> Result<ErasureReport> {
    let m = op.rows();
    let erased = m - surviving_rows(m, fraction, seed)?.len();
    let outcomes = signals
        .par_iter()
        .enumerate()
        .map(|(t, sig)| -> Result<bool> {
            let kept = surviving_rows(m, fraction, derive(seed, t as u64))?;
            let sub = RowSubset::new(op, kept)?;
            let y = sub.restrict(&op.apply(&sig.values)?);
            match solver.solve(&sub, &y) {
                Ok(res) => Ok(recovered(&res.estimate, &sig.values, EXACT_RECOVERY_TOL)),
                Err(Error::NumericallySingular { .. }) | Err(Error::Diverged { .. }) => Ok(false),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<bool>>>()?;
    let ok = outcomes.iter().filter(|&&b| b).count();
    Ok(ErasureReport {
        fraction,
        erased,
        trials: signals.len(),
        recovered: ok,
        rate: ok as f64 / signals.len().max(1) as f64,
    })
}

/// Mean PSNR of Kronecker reconstructions of `image` over `trials` random
/// erasure patterns of `fraction` of the measurement entries.
pub fn erasure_psnr(
    kop: &KroneckerOperator,
    image: &DMatrix<f64>,
    fraction: f64,
    options: &KcsOptions,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    let y = kop.apply(image)?;
    let (mr, mc) = y.shape();
    let psnrs = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<f64> {
            let kept = surviving_rows(mr * mc, fraction, derive(seed, t as u64))?;
            let mut mask = DMatrix::from_element(mr, mc, false);
            for k in kept {
                mask[k] = true;
            }
            let res = kcs_recover(&y, kop, options, Some(&mask))?;
            psnr(image, &res.as_matrix().expect("2D result"), 255.0)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(psnrs.iter().sum::<f64>() / trials.max(1) as f64)
}

/// Per-sub-signal energies of `op` applied to `x`.
pub fn sub_signal_energies(op: &StructuredOperator, x: &[f64]) -> Result<Vec<f64>> {
    Ok(op.sub_signal_measurements(x)?.iter().map(|y| norm_sq(y)).collect())
}
