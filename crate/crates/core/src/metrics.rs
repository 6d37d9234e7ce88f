//! Fidelity (PSNR, SSIM) and payload agreement (NC, BER).

use serde::{Deserialize, Serialize};

use crate::codec::Watermark;
use crate::error::{input, Result};
use crate::image::GrayImage;

const PEAK: f64 = 255.0;

fn check_same(a: &GrayImage, b: &GrayImage) -> Result<()> {
    if !a.same_dimensions(b) {
        return Err(input(format!("image sizes differ: {}x{} vs {}x{}", a.width(), a.height(), b.width(), b.height())));
    }
    Ok(())
}

pub fn mse(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    check_same(a, b)?;
    let sum: f64 = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(&x, &y)| {
            let d = f64::from(x) - f64::from(y);
            d * d
        })
        .sum();
    Ok(sum / a.samples().len() as f64)
}

/// Peak signal-to-noise ratio in dB; identical images give `f64::INFINITY`.
pub fn psnr(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    Ok(psnr_from_mse(mse(a, b)?))
}

pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (PEAK * PEAK / mse).log10()
    }
}

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;

fn gaussian_window() -> [f64; SSIM_WINDOW] {
    let r = (SSIM_WINDOW / 2) as f64;
    let mut w = [0.0; SSIM_WINDOW];
    for (i, v) in w.iter_mut().enumerate() {
        let x = i as f64 - r;
        *v = (-x * x / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let s: f64 = w.iter().sum();
    w.map(|v| v / s)
}

/// Separable Gaussian filtering, "valid" region only.
fn filter_valid(x: &[f64], width: usize, height: usize, w: &[f64; SSIM_WINDOW]) -> (Vec<f64>, usize, usize) {
    let ow = width - SSIM_WINDOW + 1;
    let oh = height - SSIM_WINDOW + 1;
    let mut rows = vec![0.0; ow * height];
    for r in 0..height {
        let src = &x[r * width..(r + 1) * width];
        for c in 0..ow {
            rows[r * ow + c] = w.iter().zip(&src[c..c + SSIM_WINDOW]).map(|(a, b)| a * b).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for r in 0..oh {
        for c in 0..ow {
            out[r * ow + c] = (0..SSIM_WINDOW).map(|k| w[k] * rows[(r + k) * ow + c]).sum();
        }
    }
    (out, ow, oh)
}

/// Mean structural similarity with an 11x11 Gaussian window (sigma 1.5),
/// `K1 = 0.01`, `K2 = 0.03`, dynamic range 255, over the valid region.
pub fn ssim(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    check_same(a, b)?;
    let (w, h) = (a.width(), a.height());
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(input(format!("SSIM needs at least 11x11 images, got {w}x{h}")));
    }
    let win = gaussian_window();
    let fa: Vec<f64> = a.samples().iter().map(|&v| f64::from(v)).collect();
    let fb: Vec<f64> = b.samples().iter().map(|&v| f64::from(v)).collect();
    let prod = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| p * q).collect::<Vec<f64>>();
    let (mu_a, ow, oh) = filter_valid(&fa, w, h, &win);
    let (mu_b, _, _) = filter_valid(&fb, w, h, &win);
    let (aa, _, _) = filter_valid(&prod(&fa, &fa), w, h, &win);
    let (bb, _, _) = filter_valid(&prod(&fb, &fb), w, h, &win);
    let (ab, _, _) = filter_valid(&prod(&fa, &fb), w, h, &win);

    let c1 = (SSIM_K1 * PEAK).powi(2);
    let c2 = (SSIM_K2 * PEAK).powi(2);
    let mut total = 0.0;
    for i in 0..ow * oh {
        let (ma, mb) = (mu_a[i], mu_b[i]);
        let va = aa[i] - ma * ma;
        let vb = bb[i] - mb * mb;
        let cov = ab[i] - ma * mb;
        total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
    Ok(total / (ow * oh) as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarityResult {
    pub nc: f64,
    pub ber: f64,
}

/// Normalised cross-correlation of the 0/1 sequences and the fraction of
/// mismatched bits. NC is 1 when both sequences are all zero and 0 when
/// exactly one is.
pub fn similarity(original: &Watermark, extracted: &Watermark) -> Result<SimilarityResult> {
    if original.len() != extracted.len() {
        return Err(input(format!("watermark lengths differ: {} vs {}", original.len(), extracted.len())));
    }
    let (mut dot, mut ea, mut eb, mut diff) = (0u64, 0u64, 0u64, 0usize);
    for (&x, &y) in original.bits().iter().zip(extracted.bits()) {
        dot += u64::from(x & y);
        ea += u64::from(x);
        eb += u64::from(y);
        diff += usize::from(x != y);
    }
    let nc = if ea == 0 && eb == 0 {
        1.0
    } else if ea == 0 || eb == 0 {
        0.0
    } else {
        dot as f64 / ((ea as f64) * (eb as f64)).sqrt()
    };
    Ok(SimilarityResult { nc, ber: diff as f64 / original.len() as f64 })
}
