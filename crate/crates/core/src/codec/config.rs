use serde::{Deserialize, Serialize};

use crate::complexity::StrengthParams;
use crate::error::{input, Result};

/// 1-based `(row, col)` coordinate of a DCT coefficient inside a block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoeffPos(pub usize, pub usize);

impl CoeffPos {
    /// 0-based `(row, col)`.
    pub fn index(self) -> (usize, usize) {
        (self.0 - 1, self.1 - 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EmbedConfig {
    /// Block side in the approximate scale.
    pub block_approx: usize,
    /// Block side in each directional detail subband.
    pub block_detail: usize,
    pub approx_positions: [CoeffPos; 2],
    pub detail_positions: [CoeffPos; 2],
    pub strength: StrengthParams,
    /// Gain applied to subband coefficients before margins are measured.
    /// The transforms use DC-normalized filters; 2 expresses coefficients in
    /// the sqrt(2)-per-split normalization that the default strengths assume.
    pub subband_gain: f64,
    /// `false` uses the fixed `alpha0` of each scale for every block.
    pub adaptive: bool,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        Self {
            block_approx: 4,
            block_detail: 16,
            approx_positions: [CoeffPos(3, 4), CoeffPos(4, 3)],
            detail_positions: [CoeffPos(14, 15), CoeffPos(15, 14)],
            strength: StrengthParams::default(),
            subband_gain: 2.0,
            adaptive: true,
        }
    }
}

impl EmbedConfig {
    pub fn non_adaptive(self) -> Self {
        Self { adaptive: false, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, side, positions) in [
            ("approximate", self.block_approx, &self.approx_positions),
            ("detail", self.block_detail, &self.detail_positions),
        ] {
            if side < 3 {
                return Err(input(format!("{name} block side must be at least 3, got {side}")));
            }
            for p in positions {
                if p.0 == 0 || p.1 == 0 || p.0 > side || p.1 > side {
                    return Err(input(format!(
                        "{name} coefficient ({}, {}) lies outside a {side}x{side} block (1-based)",
                        p.0, p.1
                    )));
                }
            }
            if positions[0] == positions[1] {
                return Err(input(format!("{name} coefficient positions must differ")));
            }
        }
        if !(self.subband_gain.is_finite() && self.subband_gain > 0.0) {
            return Err(input(format!("subband gain must be positive, got {}", self.subband_gain)));
        }
        self.strength.validate()
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let cfg: Self = serde_json::from_slice(&std::fs::read(path)?)?;
        cfg.validate()?;
        Ok(cfg)
    }
}
