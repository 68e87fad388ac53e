//! Procedurally generated 128×128 test images used by the security and
//! reconstruction experiments. They carry the traits that matter here: large
//! smooth regions, sharp edges, bright and dark areas, and mild texture.

use nalgebra::DMatrix;
use rand::Rng as _;

use crate::rng::rng_from_seed;

pub const SIDE: usize = 128;

pub const NAMES: [&str; 3] = ["discs", "ramp-shapes", "waves"];

fn texture(seed: u64, amplitude: f64) -> DMatrix<f64> {
    let mut rng = rng_from_seed(seed);
    let noise = DMatrix::from_fn(SIDE, SIDE, |_, _| rng.random_range(-1.0..1.0));
    // 3×3 box blur so the texture is spatially correlated like film grain
    DMatrix::from_fn(SIDE, SIDE, |r, c| {
        let mut acc = 0.0;
        let mut cnt = 0.0;
        for dr in -1i64..=1 {
            for dc in -1i64..=1 {
                let (rr, cc) = (r as i64 + dr, c as i64 + dc);
                if (0..SIDE as i64).contains(&rr) && (0..SIDE as i64).contains(&cc) {
                    acc += noise[(rr as usize, cc as usize)];
                    cnt += 1.0;
                }
            }
        }
        amplitude * acc / cnt
    })
}

fn finish(mut img: DMatrix<f64>, seed: u64) -> DMatrix<f64> {
    img += texture(seed, 12.0);
    img.map(|v| v.round().clamp(0.0, 255.0))
}

/// Bright discs of different intensities over a dark vignette.
pub fn discs() -> DMatrix<f64> {
    let discs = [
        (34.0, 40.0, 22.0, 230.0),
        (90.0, 30.0, 16.0, 170.0),
        (80.0, 92.0, 28.0, 205.0),
        (30.0, 100.0, 12.0, 120.0),
    ];
    let img = DMatrix::from_fn(SIDE, SIDE, |r, c| {
        let (y, x) = (r as f64, c as f64);
        let vignette = 18.0 + 30.0 * (-((x - 64.0).powi(2) + (y - 64.0).powi(2)) / 3000.0).exp();
        discs.iter().fold(vignette, |acc, &(cy, cx, rad, level)| {
            let d = ((x - cx).powi(2) + (y - cy).powi(2)).sqrt();
            let edge = ((rad - d) / 1.5).clamp(0.0, 1.0);
            acc + edge * (level - acc)
        })
    });
    finish(img, 101)
}

/// Diagonal brightness ramp with overlaid rectangles.
pub fn ramp_shapes() -> DMatrix<f64> {
    let rects = [
        (10usize, 60usize, 15usize, 50usize, 15.0),
        (70, 115, 20, 60, 245.0),
        (30, 55, 80, 120, 60.0),
        (85, 110, 85, 110, 200.0),
    ];
    let img = DMatrix::from_fn(SIDE, SIDE, |r, c| {
        let base = 25.0 + 200.0 * (r + c) as f64 / (2 * SIDE) as f64;
        rects
            .iter()
            .find(|&&(r0, r1, c0, c1, _)| (r0..r1).contains(&r) && (c0..c1).contains(&c))
            .map_or(base, |&(.., level)| level)
    });
    finish(img, 202)
}

/// Smooth interference pattern on a gradient, with a dark band.
pub fn waves() -> DMatrix<f64> {
    let img = DMatrix::from_fn(SIDE, SIDE, |r, c| {
        let (y, x) = (r as f64, c as f64);
        let pattern = 70.0 * (x / 11.0).sin() * (y / 17.0).cos();
        let gradient = 40.0 + 1.1 * y;
        let band = if (50.0..70.0).contains(&(x * 0.7 + y * 0.3)) { -90.0 } else { 0.0 };
        gradient + pattern + band + 30.0
    });
    finish(img, 303)
}

pub fn by_name(name: &str) -> Option<DMatrix<f64>> {
    match name {
        "discs" => Some(discs()),
        "ramp-shapes" => Some(ramp_shapes()),
        "waves" => Some(waves()),
        _ => None,
    }
}

/// All bundled images as `(name, image)`.
pub fn all() -> Vec<(&'static str, DMatrix<f64>)> {
    NAMES.iter().map(|&n| (n, by_name(n).expect("known name"))).collect()
}
