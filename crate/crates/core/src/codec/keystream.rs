use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// 64-bit secret seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SecretKey(pub u64);

impl fmt::Display for SecretKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

impl FromStr for SecretKey {
    type Err = Error;

    /// Up to 16 hex digits, optionally prefixed with `0x`.
    fn from_str(s: &str) -> Result<Self> {
        let digits = s.trim().trim_start_matches("0x").trim_start_matches("0X");
        if digits.is_empty() || digits.len() > 16 {
            return Err(input(format!("key must be 1-16 hex digits, got {s:?}")));
        }
        u64::from_str_radix(digits, 16).map(SecretKey).map_err(|e| input(format!("bad hex key {s:?}: {e}")))
    }
}

/// SplitMix64 word generator.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

/// Payload bit sequence (each entry 0 or 1).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Watermark {
    bits: Vec<u8>,
}

impl Watermark {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() {
            return Err(input("watermark must carry at least one bit"));
        }
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(input(format!("watermark bits must be 0 or 1, found {b}")));
        }
        Ok(Self { bits })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    #[inline]
    pub fn bit(&self, i: usize) -> u8 {
        self.bits[i]
    }

    /// Parses ASCII `'0'`/`'1'`; whitespace is ignored.
    pub fn from_ascii(text: &str) -> Result<Self> {
        let bits = text
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(input(format!("payload may only contain '0' and '1', found {other:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(bits)
    }

    pub fn to_ascii(&self) -> String {
        self.bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
    }

    pub fn complemented(&self) -> Self {
        Self { bits: self.bits.iter().map(|b| 1 - b).collect() }
    }
}

/// Deterministic payload: SplitMix64 words from the key, emitted most
/// significant bit first, truncated to `len` bits.
pub fn keystream(key: SecretKey, len: usize) -> Result<Watermark> {
    if len == 0 {
        return Err(input("payload length must be at least 1"));
    }
    let mut rng = SplitMix64::new(key.0);
    let mut bits = Vec::with_capacity(len);
    while bits.len() < len {
        let word = rng.next_u64();
        let take = (len - bits.len()).min(64);
        bits.extend((0..take).map(|i| ((word >> (63 - i)) & 1) as u8));
    }
    Ok(Watermark { bits })
}
