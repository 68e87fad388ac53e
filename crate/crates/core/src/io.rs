//! Binary 8-bit PGM (P5) images.

use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Parses a P5 image into a `rows × cols` matrix of intensities in `[0, 255]`.
pub fn decode_pgm(bytes: &[u8]) -> Result<DMatrix<f64>> {
    let mut pos = 0usize;
    let mut tokens = Vec::with_capacity(4);
    while tokens.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() && bytes[pos] != b'#' {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Parse("truncated PGM header".into()));
        }
        tokens.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    if tokens[0] != "P5" {
        return Err(Error::Parse(format!("expected binary PGM (P5), found `{}`", tokens[0])));
    }
    let num = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::Parse(format!("bad PGM header field `{s}`")))
    };
    let (cols, rows, maxval) = (num(&tokens[1])?, num(&tokens[2])?, num(&tokens[3])?);
    if maxval == 0 || maxval > 255 {
        return Err(Error::Parse(format!("only 8-bit PGM supported (maxval {maxval})")));
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    let raster = bytes
        .get(pos..pos + rows * cols)
        .ok_or_else(|| Error::Parse("truncated PGM raster".into()))?;
    let scale = 255.0 / maxval as f64;
    Ok(DMatrix::from_fn(rows, cols, |r, c| raster[r * cols + c] as f64 * scale))
}

/// Encodes intensities as 8-bit P5, rounding and clamping to `[0, 255]`.
/// Each comment line is written as `# <line>` in the header.
pub fn encode_pgm(image: &DMatrix<f64>, comments: &[String]) -> Vec<u8> {
    let mut out = Vec::with_capacity(image.len() + 64);
    out.extend_from_slice(b"P5\n");
    for c in comments {
        for line in c.lines() {
            out.extend_from_slice(b"# ");
            out.extend_from_slice(line.as_bytes());
            out.push(b'\n');
        }
    }
    write!(out, "{} {}\n255\n", image.ncols(), image.nrows()).expect("write to Vec");
    for r in 0..image.nrows() {
        for c in 0..image.ncols() {
            out.push(image[(r, c)].round().clamp(0.0, 255.0) as u8);
        }
    }
    out
}

pub fn read_pgm(path: &Path) -> Result<DMatrix<f64>> {
    decode_pgm(&std::fs::read(path)?)
}

pub fn write_pgm(path: &Path, image: &DMatrix<f64>, comments: &[String]) -> Result<()> {
    std::fs::write(path, encode_pgm(image, comments))?;
    Ok(())
}

/// Linearly stretches values to `[0, 255]` for display (heat maps).
pub fn stretch_to_u8_range(values: &DMatrix<f64>) -> DMatrix<f64> {
    let lo = values.min();
    let hi = values.max();
    if hi > lo {
        values.map(|v| 255.0 * (v - lo) / (hi - lo))
    } else {
        values.map(|_| 0.0)
    }
}
