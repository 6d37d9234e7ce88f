//! Two-level complexity hierarchy.
//!
//! Pixel complexity is the sum of absolute luminance differences to the
//! eight neighbours. Averaged over an image it ranks the image against a
//! reference dataset (initial strength `alpha_i`); averaged over a block it
//! drives the per-block strength `alpha_m` along the scan order.

use serde::{Deserialize, Serialize};

use crate::error::{dimension, input, Result};
use crate::image::{CoeffGrid, GrayImage};

/// Denominator guard for the relative complexity change.
pub const GAMMA_EPSILON: f64 = 1e-9;

/// Per-pixel complexity over the interior of a grid (the one-pixel border is
/// absent, so the map is `(width - 2) x (height - 2)`).
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexityMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl ComplexityMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value for interior pixel `(row, col)` of the source grid (1-based
    /// relative to the border, i.e. `row` and `col` start at 1).
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.values[(row - 1) * self.width + (col - 1)]
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

pub fn complexity_map(grid: &CoeffGrid) -> Result<ComplexityMap> {
    let (w, h) = (grid.width(), grid.height());
    if w < 3 || h < 3 {
        return Err(dimension(format!("complexity needs at least 3x3 samples, got {w}x{h}")));
    }
    let mut values = Vec::with_capacity((w - 2) * (h - 2));
    for r in 1..h - 1 {
        for c in 1..w - 1 {
            let center = grid.get(r, c);
            let mut sum = 0.0;
            for nr in r - 1..=r + 1 {
                for nc in c - 1..=c + 1 {
                    sum += (center - grid.get(nr, nc)).abs();
                }
            }
            values.push(sum);
        }
    }
    Ok(ComplexityMap { width: w - 2, height: h - 2, values })
}

/// Mean pixel complexity of a block, using only neighbourhoods inside it.
pub fn block_complexity(block: &CoeffGrid) -> Result<f64> {
    Ok(complexity_map(block)?.mean())
}

/// Mean pixel complexity over all non-border pixels of an image.
pub fn image_mean_complexity(image: &GrayImage) -> Result<f64> {
    Ok(complexity_map(&image.to_coeffs())?.mean())
}

/// Mean and population standard deviation of per-image mean complexities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    #[serde(rename = "mu_D")]
    pub mu_d: f64,
    #[serde(rename = "sigma_D")]
    pub sigma_d: f64,
    pub image_count: usize,
}

impl DatasetStats {
    pub fn from_means(means: &[f64]) -> Result<Self> {
        if means.is_empty() {
            return Err(input("dataset statistics need at least one image"));
        }
        let n = means.len() as f64;
        let mu = means.iter().sum::<f64>() / n;
        let var = means.iter().map(|m| (m - mu) * (m - mu)).sum::<f64>() / n;
        Ok(Self { mu_d: mu, sigma_d: var.sqrt(), image_count: means.len() })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu_d.is_finite() && self.mu_d >= 0.0) {
            return Err(input(format!("mu_D must be finite and non-negative, got {}", self.mu_d)));
        }
        if !(self.sigma_d.is_finite() && self.sigma_d >= 0.0) {
            return Err(input(format!("sigma_D must be finite and non-negative, got {}", self.sigma_d)));
        }
        if self.image_count == 0 {
            return Err(input("image_count must be at least 1"));
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let stats: Self = serde_json::from_slice(&std::fs::read(path)?)?;
        stats.validate()?;
        Ok(stats)
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}

pub fn dataset_stats(images: &[GrayImage]) -> Result<DatasetStats> {
    let means = images.iter().map(image_mean_complexity).collect::<Result<Vec<_>>>()?;
    DatasetStats::from_means(&means)
}

/// Inter-image adaptivity: images whose mean complexity lies more than one
/// standard deviation away from the dataset mean get a proportionally
/// scaled strength. A flat dataset (`mu_D == 0`) leaves `alpha0` unchanged.
pub fn initial_alpha(mu_i: f64, stats: &DatasetStats, alpha0: f64) -> f64 {
    if stats.mu_d <= 0.0 || (mu_i - stats.mu_d).abs() <= stats.sigma_d {
        alpha0
    } else {
        alpha0 * (mu_i / stats.mu_d)
    }
}

/// Strength-control parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrengthParams {
    pub alpha0_approx: f64,
    pub alpha0_detail: f64,
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "T1")]
    pub t1: f64,
    #[serde(rename = "T2")]
    pub t2: f64,
}

impl Default for StrengthParams {
    fn default() -> Self {
        Self { alpha0_approx: 11.0, alpha0_detail: 9.0, s: 1.1, t1: 0.5, t2: 1.5 }
    }
}

impl StrengthParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha0_approx > 0.0 && self.alpha0_approx.is_finite()) {
            return Err(input("alpha0_approx must be positive"));
        }
        if !(self.alpha0_detail > 0.0 && self.alpha0_detail.is_finite()) {
            return Err(input("alpha0_detail must be positive"));
        }
        if !(self.s >= 1.0 && self.s.is_finite()) {
            return Err(input(format!("S must be >= 1, got {}", self.s)));
        }
        if !(self.t1 > 0.0 && self.t1 <= 1.0) {
            return Err(input(format!("T1 must lie in (0, 1], got {}", self.t1)));
        }
        if !(self.t2 >= 1.0 && self.t2.is_finite()) {
            return Err(input(format!("T2 must be >= 1, got {}", self.t2)));
        }
        Ok(())
    }
}

/// Running state of the per-block strength chain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrengthState {
    pub alpha_i: f64,
    pub alpha_m: f64,
    pub prev_block_complexity: f64,
}

impl StrengthState {
    /// State for the first scanned block, which uses `alpha_i` directly.
    pub fn start(alpha_i: f64, first_block_complexity: f64) -> Self {
        Self { alpha_i, alpha_m: alpha_i, prev_block_complexity: first_block_complexity }
    }
}

/// Relative complexity change `(current - previous) / previous`, guarded
/// for flat predecessors.
pub fn relative_change(previous: f64, current: f64) -> f64 {
    if previous <= GAMMA_EPSILON && current <= GAMMA_EPSILON {
        return 0.0;
    }
    (current - previous) / previous.max(GAMMA_EPSILON)
}

/// Clamped strength update for a given relative complexity change.
pub fn alpha_for_gamma(alpha_prev: f64, alpha_i: f64, gamma: f64, params: &StrengthParams) -> f64 {
    if gamma < 0.0 {
        ((1.0 + gamma) * alpha_prev / params.s).max(params.t1 * alpha_i)
    } else {
        (params.s * (1.0 + gamma) * alpha_prev).min(params.t2 * alpha_i)
    }
}

/// Advances the strength chain to a block with complexity `block_complexity`.
pub fn next_alpha(state: &StrengthState, block_complexity: f64, params: &StrengthParams) -> StrengthState {
    let gamma = relative_change(state.prev_block_complexity, block_complexity);
    StrengthState {
        alpha_i: state.alpha_i,
        alpha_m: alpha_for_gamma(state.alpha_m, state.alpha_i, gamma, params),
        prev_block_complexity: block_complexity,
    }
}
