//! One-level Laplacian pyramid with the 9-7 pair.
//!
//! The coarse image is the 2x-decimated analysis lowpass; the bandpass is
//! the full-resolution residual against the synthesis-filter prediction.
//! Reconstruction uses the dual frame: the lowpass leak of the bandpass is
//! removed from the coarse image before interpolation. This is exact on
//! unmodified subbands and projects edits of either subband back onto the
//! pyramid range instead of passing them through unfiltered.

use crate::error::{dimension, Result};
use crate::image::CoeffGrid;
use crate::transforms::extend::reflect;
use crate::transforms::filters::FilterPair;

/// Whole-sample symmetric extension of `x` by `r` samples on each side.
fn padded(x: &[f64], r: usize, buf: &mut Vec<f64>) {
    let n = x.len();
    buf.clear();
    buf.extend((0..n + 2 * r).map(|i| x[reflect(i as isize - r as isize, n)]));
}

/// Lowpass filter then keep even samples.
fn analyze_1d(x: &[f64], taps: &[f64], pad: &mut Vec<f64>, out: &mut Vec<f64>) {
    let r = taps.len() / 2;
    padded(x, r, pad);
    out.clear();
    out.extend((0..x.len() / 2).map(|k| taps.iter().zip(&pad[2 * k..]).map(|(h, v)| h * v).sum::<f64>()));
}

/// Zero-insert to length `n` then filter.
fn synthesize_1d(c: &[f64], n: usize, taps: &[f64], pad: &mut Vec<f64>, out: &mut Vec<f64>) {
    let r = taps.len() / 2;
    let mut up = vec![0.0; n];
    for (k, &v) in c.iter().enumerate() {
        up[2 * k] = v;
    }
    padded(&up, r, pad);
    out.clear();
    // taps are symmetric, so correlation equals convolution
    out.extend((0..n).map(|i| taps.iter().zip(&pad[i..]).map(|(g, v)| g * v).sum::<f64>()));
}

fn transpose(g: &CoeffGrid) -> CoeffGrid {
    CoeffGrid::from_fn(g.height(), g.width(), |r, c| g.get(c, r))
}

fn map_rows(g: &CoeffGrid, out_width: usize, f: impl Fn(&[f64], &mut Vec<f64>, &mut Vec<f64>)) -> CoeffGrid {
    let mut values = Vec::with_capacity(out_width * g.height());
    let mut buf = Vec::with_capacity(out_width);
    let mut pad = Vec::new();
    for r in 0..g.height() {
        f(g.row(r), &mut pad, &mut buf);
        values.extend_from_slice(&buf);
    }
    CoeffGrid::new(out_width, g.height(), values).expect("row mapping preserves shape")
}

/// Separable lowpass + 2x decimation.
pub fn lowpass_decimate(image: &CoeffGrid, filters: &FilterPair) -> CoeffGrid {
    let h = &filters.analysis;
    let rows = map_rows(image, image.width() / 2, |x, pad, out| analyze_1d(x, h, pad, out));
    let cols = map_rows(&transpose(&rows), image.height() / 2, |x, pad, out| analyze_1d(x, h, pad, out));
    transpose(&cols)
}

/// Separable 2x interpolation of a coarse image back to `width x height`.
pub fn interpolate(coarse: &CoeffGrid, width: usize, height: usize, filters: &FilterPair) -> CoeffGrid {
    let g = &filters.synthesis;
    let rows = map_rows(coarse, width, |c, pad, out| synthesize_1d(c, width, g, pad, out));
    let cols = map_rows(&transpose(&rows), height, |c, pad, out| synthesize_1d(c, height, g, pad, out));
    transpose(&cols)
}

fn check_even(image: &CoeffGrid) -> Result<()> {
    if !image.width().is_multiple_of(2) || !image.height().is_multiple_of(2) || image.width() < 2 || image.height() < 2
    {
        return Err(dimension(format!(
            "Laplacian pyramid needs even dimensions, got {}x{}",
            image.width(),
            image.height()
        )));
    }
    Ok(())
}

/// Splits `image` into `(approximate, bandpass)`.
pub fn lp_decompose(image: &CoeffGrid) -> Result<(CoeffGrid, CoeffGrid)> {
    check_even(image)?;
    let filters = FilterPair::biorthogonal_97();
    let approx = lowpass_decimate(image, &filters);
    let prediction = interpolate(&approx, image.width(), image.height(), &filters);
    let bandpass = image.zip_with(&prediction, |x, p| x - p)?;
    Ok((approx, bandpass))
}

pub fn lp_reconstruct(approximate: &CoeffGrid, bandpass: &CoeffGrid) -> Result<CoeffGrid> {
    check_even(bandpass)?;
    if approximate.width() * 2 != bandpass.width() || approximate.height() * 2 != bandpass.height() {
        return Err(dimension(format!(
            "approximate {}x{} does not match bandpass {}x{}",
            approximate.width(),
            approximate.height(),
            bandpass.width(),
            bandpass.height()
        )));
    }
    let filters = FilterPair::biorthogonal_97();
    let leak = lowpass_decimate(bandpass, &filters);
    let coarse = approximate.zip_with(&leak, |c, l| c - l)?;
    let prediction = interpolate(&coarse, bandpass.width(), bandpass.height(), &filters);
    prediction.zip_with(bandpass, |p, d| p + d)
}
