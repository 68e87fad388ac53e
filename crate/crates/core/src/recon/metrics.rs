use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// PSNR ceiling reported for identical images.
pub const PSNR_CAP: f64 = 100.0;

fn same_shape(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::Dimension {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(())
}

/// `10·log10(peak² / MSE)`, capped at 100 dB.
pub fn psnr(reference: &DMatrix<f64>, test: &DMatrix<f64>, peak: f64) -> Result<f64> {
    same_shape(reference, test)?;
    if peak.is_nan() || peak <= 0.0 {
        return Err(Error::InvalidConfig("peak must be positive".into()));
    }
    let mse = (reference - test).norm_squared() / reference.len().max(1) as f64;
    if mse == 0.0 {
        return Ok(PSNR_CAP);
    }
    Ok((10.0 * (peak * peak / mse).log10()).min(PSNR_CAP))
}

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const K1: f64 = 0.01;
const K2: f64 = 0.03;
const DYNAMIC_RANGE: f64 = 255.0;

fn gaussian_kernel(size: usize, sigma: f64) -> Vec<f64> {
    let half = (size as f64 - 1.0) / 2.0;
    let k: Vec<f64> = (0..size)
        .map(|i| (-((i as f64 - half).powi(2)) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = k.iter().sum();
    k.into_iter().map(|v| v / sum).collect()
}

/// Separable "valid" filtering with a 1D kernel along both axes.
fn filter_valid(img: &DMatrix<f64>, k: &[f64]) -> DMatrix<f64> {
    let w = k.len();
    let (r, c) = img.shape();
    let (or, oc) = (r + 1 - w, c + 1 - w);
    let horiz = DMatrix::from_fn(r, oc, |i, j| (0..w).map(|t| k[t] * img[(i, j + t)]).sum::<f64>());
    DMatrix::from_fn(or, oc, |i, j| (0..w).map(|t| k[t] * horiz[(i + t, j)]).sum::<f64>())
}

/// Mean SSIM over all valid 11×11 Gaussian windows (σ = 1.5, K1 = 0.01,
/// K2 = 0.03, 8-bit range). Images smaller than 11 pixels on a side use the
/// largest odd window that fits.
pub fn ssim(reference: &DMatrix<f64>, test: &DMatrix<f64>) -> Result<f64> {
    same_shape(reference, test)?;
    let min_side = reference.nrows().min(reference.ncols());
    if min_side == 0 {
        return Err(Error::RejectedInput("empty image".into()));
    }
    let size = if min_side >= SSIM_WINDOW {
        SSIM_WINDOW
    } else if min_side % 2 == 1 {
        min_side
    } else {
        min_side - 1
    };
    let k = gaussian_kernel(size, SSIM_SIGMA);
    let c1 = (K1 * DYNAMIC_RANGE).powi(2);
    let c2 = (K2 * DYNAMIC_RANGE).powi(2);
    let mu_x = filter_valid(reference, &k);
    let mu_y = filter_valid(test, &k);
    let xx = filter_valid(&reference.component_mul(reference), &k);
    let yy = filter_valid(&test.component_mul(test), &k);
    let xy = filter_valid(&reference.component_mul(test), &k);
    let mut total = 0.0;
    for idx in 0..mu_x.len() {
        let (mx, my) = (mu_x[idx], mu_y[idx]);
        let sx = xx[idx] - mx * mx;
        let sy = yy[idx] - my * my;
        let sxy = xy[idx] - mx * my;
        total += ((2.0 * mx * my + c1) * (2.0 * sxy + c2))
            / ((mx * mx + my * my + c1) * (sx + sy + c2));
    }
    Ok(total / mu_x.len() as f64)
}
