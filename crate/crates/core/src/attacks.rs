//! Seedable attack suite. Every attack returns an image of the input's size.

use std::fmt;
use std::str::FromStr;

use image::codecs::jpeg::JpegEncoder;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::image::{quantize, GrayImage};
use crate::transforms::extend::reflect;

/// Default gamma exponent for the "GC" column.
pub const DEFAULT_GAMMA: f64 = 0.8;
/// Default unsharp-mask amount for the "SH" column.
pub const DEFAULT_SHARPEN: f64 = 1.0;
const CROP_FILL: u8 = 128;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AttackSpec {
    Jpeg {
        quality: u8,
    },
    /// Rotate by `degrees` about the centre and back (distortion only).
    Rotate {
        degrees: f64,
    },
    /// Remove a border so that the centred kept region has area
    /// `(1 - ratio) M N`; the removed area becomes mid-gray.
    Crop {
        ratio: f64,
    },
    /// Bilinear scale by `factor` and back to the original size.
    Resize {
        factor: f64,
    },
    /// Additive Gaussian noise; `variance` is on the `[0, 1]` intensity scale.
    GaussianNoise {
        variance: f64,
        seed: u64,
    },
    SaltPepper {
        density: f64,
        seed: u64,
    },
    Median {
        window: usize,
    },
    HistEq,
    Gamma {
        exponent: f64,
    },
    /// Unsharp mask against a 3x3 binomial blur.
    Sharpen {
        amount: f64,
    },
}

impl AttackSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            AttackSpec::Jpeg { quality } => (1..=100).contains(&quality),
            AttackSpec::Rotate { degrees } => degrees.is_finite(),
            AttackSpec::Crop { ratio } => ratio > 0.0 && ratio < 1.0,
            AttackSpec::Resize { factor } => factor > 0.0 && factor <= 4.0,
            AttackSpec::GaussianNoise { variance, .. } => variance.is_finite() && variance >= 0.0,
            AttackSpec::SaltPepper { density, .. } => (0.0..=1.0).contains(&density),
            AttackSpec::Median { window } => matches!(window, 3 | 5 | 7),
            AttackSpec::HistEq => true,
            AttackSpec::Gamma { exponent } => exponent.is_finite() && exponent > 0.0,
            AttackSpec::Sharpen { amount } => amount.is_finite() && amount >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(input(format!("attack parameters out of range: {self}")))
        }
    }

    /// Replaces the seed of noise attacks; other variants are unchanged.
    pub fn with_seed(self, seed: u64) -> Self {
        match self {
            AttackSpec::GaussianNoise { variance, .. } => AttackSpec::GaussianNoise { variance, seed },
            AttackSpec::SaltPepper { density, .. } => AttackSpec::SaltPepper { density, seed },
            other => other,
        }
    }

    /// Short column label used in reports.
    pub fn label(&self) -> String {
        self.to_string()
    }

    /// The twelve-column robustness table: GC, HE, MF, JC, S&P, RS, SH, GN,
    /// C10%, C25%, R20, R45.
    pub fn table_suite() -> Vec<AttackSpec> {
        vec![
            AttackSpec::Gamma { exponent: DEFAULT_GAMMA },
            AttackSpec::HistEq,
            AttackSpec::Median { window: 3 },
            AttackSpec::Jpeg { quality: 70 },
            AttackSpec::SaltPepper { density: 0.01, seed: 0 },
            AttackSpec::Resize { factor: 0.5 },
            AttackSpec::Sharpen { amount: DEFAULT_SHARPEN },
            AttackSpec::GaussianNoise { variance: 0.005, seed: 0 },
            AttackSpec::Crop { ratio: 0.10 },
            AttackSpec::Crop { ratio: 0.25 },
            AttackSpec::Rotate { degrees: 20.0 },
            AttackSpec::Rotate { degrees: 45.0 },
        ]
    }
}

impl fmt::Display for AttackSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            AttackSpec::Jpeg { quality } => write!(f, "jpeg:{quality}"),
            AttackSpec::Rotate { degrees } => write!(f, "rotate:{degrees}"),
            AttackSpec::Crop { ratio } => write!(f, "crop:{ratio}"),
            AttackSpec::Resize { factor } => write!(f, "resize:{factor}"),
            AttackSpec::GaussianNoise { variance, .. } => write!(f, "gn:{variance}"),
            AttackSpec::SaltPepper { density, .. } => write!(f, "sp:{density}"),
            AttackSpec::Median { window } => write!(f, "median:{window}"),
            AttackSpec::HistEq => write!(f, "histeq"),
            AttackSpec::Gamma { exponent } => write!(f, "gamma:{exponent}"),
            AttackSpec::Sharpen { amount } => write!(f, "sharpen:{amount}"),
        }
    }
}

impl FromStr for AttackSpec {
    type Err = Error;

    /// Compact form `name[:value]`, e.g. `jpeg:70`, `crop:0.25`, `histeq`.
    /// `gamma` and `sharpen` fall back to their defaults without a value.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim().to_ascii_lowercase(), Some(a.trim())),
            None => (s.to_ascii_lowercase(), None),
        };
        let num = |what: &str| -> Result<f64> {
            let a = arg.ok_or_else(|| input(format!("attack {name:?} needs a {what}")))?;
            a.parse::<f64>().map_err(|e| input(format!("bad {what} {a:?} for {name}: {e}")))
        };
        let spec = match name.as_str() {
            "jpeg" | "jc" => {
                let q = num("quality")?;
                if q.fract() != 0.0 || !(1.0..=100.0).contains(&q) {
                    return Err(input(format!("JPEG quality must be an integer in 1..=100, got {q}")));
                }
                AttackSpec::Jpeg { quality: q as u8 }
            }
            "rotate" | "r" => AttackSpec::Rotate { degrees: num("angle")? },
            "crop" | "c" => AttackSpec::Crop { ratio: num("ratio")? },
            "resize" | "rs" => AttackSpec::Resize { factor: num("scale")? },
            "gn" | "gaussian" => AttackSpec::GaussianNoise { variance: num("variance")?, seed: 0 },
            "sp" | "saltpepper" => AttackSpec::SaltPepper { density: num("density")?, seed: 0 },
            "median" | "mf" => {
                let w = num("window")?;
                if w.fract() != 0.0 || w < 0.0 {
                    return Err(input(format!("median window must be 3, 5 or 7, got {w}")));
                }
                AttackSpec::Median { window: w as usize }
            }
            "histeq" | "he" => AttackSpec::HistEq,
            "gamma" | "gc" => {
                AttackSpec::Gamma { exponent: if arg.is_some() { num("exponent")? } else { DEFAULT_GAMMA } }
            }
            "sharpen" | "sh" => {
                AttackSpec::Sharpen { amount: if arg.is_some() { num("amount")? } else { DEFAULT_SHARPEN } }
            }
            other => return Err(input(format!("unknown attack {other:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Parses a comma-separated list; `all` expands to [`AttackSpec::table_suite`].
pub fn parse_attack_list(s: &str) -> Result<Vec<AttackSpec>> {
    let s = s.trim();
    if s.is_empty() || s.eq_ignore_ascii_case("none") {
        return Ok(Vec::new());
    }
    if s.eq_ignore_ascii_case("all") {
        return Ok(AttackSpec::table_suite());
    }
    s.split(',').filter(|p| !p.trim().is_empty()).map(str::parse).collect()
}

pub fn apply_attack(image: &GrayImage, spec: &AttackSpec) -> Result<GrayImage> {
    spec.validate()?;
    Ok(match *spec {
        AttackSpec::Jpeg { quality } => jpeg(image, quality)?,
        AttackSpec::Rotate { degrees } => {
            let there = rotate(image, degrees);
            rotate(&there, -degrees)
        }
        AttackSpec::Crop { ratio } => crop(image, ratio),
        AttackSpec::Resize { factor } => {
            let w = ((image.width() as f64 * factor).round() as usize).max(1);
            let h = ((image.height() as f64 * factor).round() as usize).max(1);
            let small = resize_bilinear(image, w, h);
            resize_bilinear(&small, image.width(), image.height())
        }
        AttackSpec::GaussianNoise { variance, seed } => gaussian_noise(image, variance, seed),
        AttackSpec::SaltPepper { density, seed } => salt_pepper(image, density, seed),
        AttackSpec::Median { window } => median(image, window),
        AttackSpec::HistEq => hist_eq(image),
        AttackSpec::Gamma { exponent } => gamma(image, exponent),
        AttackSpec::Sharpen { amount } => sharpen(image, amount),
    })
}

fn jpeg(image: &GrayImage, quality: u8) -> Result<GrayImage> {
    let mut buf = Vec::new();
    let buffer = image.to_luma8();
    buffer.write_with_encoder(JpegEncoder::new_with_quality(&mut buf, quality))?;
    let decoded = image::load_from_memory_with_format(&buf, image::ImageFormat::Jpeg)?;
    Ok(GrayImage::from_dynamic(&decoded))
}

/// Bilinear sample with edge clamping at fractional `(row, col)`.
fn sample_bilinear(image: &GrayImage, row: f64, col: f64) -> f64 {
    let (w, h) = (image.width(), image.height());
    let row = row.clamp(0.0, (h - 1) as f64);
    let col = col.clamp(0.0, (w - 1) as f64);
    let r0 = row.floor() as usize;
    let c0 = col.floor() as usize;
    let r1 = (r0 + 1).min(h - 1);
    let c1 = (c0 + 1).min(w - 1);
    let fr = row - r0 as f64;
    let fc = col - c0 as f64;
    let p = |r, c| f64::from(image.get(r, c));
    let top = p(r0, c0) * (1.0 - fc) + p(r0, c1) * fc;
    let bottom = p(r1, c0) * (1.0 - fc) + p(r1, c1) * fc;
    top * (1.0 - fr) + bottom * fr
}

fn rotate(image: &GrayImage, degrees: f64) -> GrayImage {
    let theta = degrees.to_radians();
    let (s, c) = theta.sin_cos();
    let cy = (image.height() as f64 - 1.0) / 2.0;
    let cx = (image.width() as f64 - 1.0) / 2.0;
    GrayImage::from_fn(image.width(), image.height(), |r, col| {
        let y = r as f64 - cy;
        let x = col as f64 - cx;
        // inverse mapping: output pixel samples the input rotated by -theta
        let sx = c * x + s * y + cx;
        let sy = -s * x + c * y + cy;
        quantize(sample_bilinear(image, sy, sx))
    })
}

/// Pixel-centre aligned bilinear resampling.
pub fn resize_bilinear(image: &GrayImage, width: usize, height: usize) -> GrayImage {
    let sy = image.height() as f64 / height as f64;
    let sx = image.width() as f64 / width as f64;
    GrayImage::from_fn(width, height, |r, c| {
        let y = (r as f64 + 0.5) * sy - 0.5;
        let x = (c as f64 + 0.5) * sx - 0.5;
        quantize(sample_bilinear(image, y, x))
    })
}

/// Kept region `(top, left, height, width)` for a centred crop.
pub fn crop_window(width: usize, height: usize, ratio: f64) -> (usize, usize, usize, usize) {
    let scale = (1.0 - ratio).sqrt();
    let kh = ((height as f64 * scale).round() as usize).min(height);
    let kw = ((width as f64 * scale).round() as usize).min(width);
    ((height - kh) / 2, (width - kw) / 2, kh, kw)
}

fn crop(image: &GrayImage, ratio: f64) -> GrayImage {
    let (top, left, kh, kw) = crop_window(image.width(), image.height(), ratio);
    GrayImage::from_fn(image.width(), image.height(), |r, c| {
        if r >= top && r < top + kh && c >= left && c < left + kw {
            image.get(r, c)
        } else {
            CROP_FILL
        }
    })
}

fn gaussian_noise(image: &GrayImage, variance: f64, seed: u64) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, variance.sqrt() * 255.0).expect("finite non-negative deviation");
    let samples = image.samples().iter().map(|&v| quantize(f64::from(v) + normal.sample(&mut rng))).collect();
    GrayImage::new(image.width(), image.height(), samples).expect("same shape")
}

fn salt_pepper(image: &GrayImage, density: f64, seed: u64) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = image
        .samples()
        .iter()
        .map(|&v| {
            let u: f64 = rng.random();
            if u < density / 2.0 {
                0
            } else if u < density {
                255
            } else {
                v
            }
        })
        .collect();
    GrayImage::new(image.width(), image.height(), samples).expect("same shape")
}

fn median(image: &GrayImage, window: usize) -> GrayImage {
    let (w, h) = (image.width(), image.height());
    let r = (window / 2) as isize;
    let mut buf = Vec::with_capacity(window * window);
    GrayImage::from_fn(w, h, |row, col| {
        buf.clear();
        for dr in -r..=r {
            let rr = reflect(row as isize + dr, h);
            for dc in -r..=r {
                buf.push(image.get(rr, reflect(col as isize + dc, w)));
            }
        }
        let mid = buf.len() / 2;
        *buf.select_nth_unstable(mid).1
    })
}

fn hist_eq(image: &GrayImage) -> GrayImage {
    let mut hist = [0usize; 256];
    for &v in image.samples() {
        hist[v as usize] += 1;
    }
    let mut cdf = [0usize; 256];
    let mut acc = 0;
    for (i, &n) in hist.iter().enumerate() {
        acc += n;
        cdf[i] = acc;
    }
    let total = image.samples().len();
    let cdf_min = cdf.iter().copied().find(|&c| c > 0).unwrap_or(0);
    if total == cdf_min {
        return image.clone();
    }
    let lut: Vec<u8> =
        cdf.iter().map(|&c| quantize((c.saturating_sub(cdf_min)) as f64 / (total - cdf_min) as f64 * 255.0)).collect();
    let samples = image.samples().iter().map(|&v| lut[v as usize]).collect();
    GrayImage::new(image.width(), image.height(), samples).expect("same shape")
}

fn gamma(image: &GrayImage, exponent: f64) -> GrayImage {
    let lut: Vec<u8> = (0..256).map(|v| quantize(255.0 * (v as f64 / 255.0).powf(exponent))).collect();
    let samples = image.samples().iter().map(|&v| lut[v as usize]).collect();
    GrayImage::new(image.width(), image.height(), samples).expect("same shape")
}

fn sharpen(image: &GrayImage, amount: f64) -> GrayImage {
    const K: [f64; 3] = [0.25, 0.5, 0.25];
    let (w, h) = (image.width(), image.height());
    GrayImage::from_fn(w, h, |row, col| {
        let mut blur = 0.0;
        for (i, kr) in K.iter().enumerate() {
            let rr = reflect(row as isize + i as isize - 1, h);
            for (j, kc) in K.iter().enumerate() {
                blur += kr * kc * f64::from(image.get(rr, reflect(col as isize + j as isize - 1, w)));
            }
        }
        let v = f64::from(image.get(row, col));
        quantize(v + amount * (v - blur))
    })
}
