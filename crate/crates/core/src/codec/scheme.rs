//! Coefficient-pair embedding in block DCTs of contourlet subbands, and the
//! blind weighted-vote extractor.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codec::config::{CoeffPos, EmbedConfig};
use crate::codec::keystream::{keystream, SecretKey, Watermark};
use crate::codec::plan::{replication_plan, ReplicationPlan};
use crate::complexity::{
    block_complexity, image_mean_complexity, initial_alpha, next_alpha, DatasetStats, StrengthParams, StrengthState,
};
use crate::error::{dimension, input, Result};
use crate::image::{partition, retile, serpentine_order, CoeffGrid, GrayImage};
use crate::transforms::{ct_decompose, ct_reconstruct, Dct2d, SubbandSet, DIRECTIONS};

/// One replica's reading of a bit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractionVote {
    pub bit: u8,
    /// Magnitude of the coefficient difference.
    pub weight: f64,
}

/// Forces the order of the coefficient pair at `positions` to encode `bit`
/// with a margin of at least `alpha`.
///
/// If the pair already satisfies the strict margin it is left alone;
/// otherwise both coefficients are moved symmetrically about their mean to a
/// gap of exactly `alpha`.
pub fn embed_bit(coeffs: &CoeffGrid, positions: &[CoeffPos; 2], alpha: f64, bit: u8) -> CoeffGrid {
    let mut out = coeffs.clone();
    embed_bit_in_place(&mut out, positions, alpha, bit);
    out
}

/// In-place [`embed_bit`]; returns whether the block changed.
pub fn embed_bit_in_place(coeffs: &mut CoeffGrid, positions: &[CoeffPos; 2], alpha: f64, bit: u8) -> bool {
    let (ur, uc) = positions[0].index();
    let (wr, wc) = positions[1].index();
    let a = coeffs.get(ur, uc);
    let c = coeffs.get(wr, wc);
    let satisfied = if bit == 1 { a > c + alpha } else { a + alpha < c };
    if satisfied {
        return false;
    }
    let mean = 0.5 * (a + c);
    let half = 0.5 * alpha;
    let (na, nc) = if bit == 1 { (mean + half, mean - half) } else { (mean - half, mean + half) };
    coeffs.set(ur, uc, na);
    coeffs.set(wr, wc, nc);
    true
}

/// Reads the bit encoded by the pair order; an exact tie reads as 0 with
/// zero weight.
pub fn read_bit(coeffs: &CoeffGrid, positions: &[CoeffPos; 2]) -> ExtractionVote {
    let (ur, uc) = positions[0].index();
    let (wr, wc) = positions[1].index();
    let diff = coeffs.get(ur, uc) - coeffs.get(wr, wc);
    ExtractionVote { bit: u8::from(diff > 0.0), weight: diff.abs() }
}

/// Strength statistics for one embedded subband.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubbandReport {
    pub subband: String,
    pub blocks: usize,
    pub modified_blocks: usize,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbedReport {
    pub width: usize,
    pub height: usize,
    pub payload_len: usize,
    pub adaptive: bool,
    /// Mean pixel complexity of the cover image.
    pub mu_i: f64,
    pub alpha_i_approx: f64,
    pub alpha_i_detail: f64,
    pub plan: ReplicationPlan,
    pub subbands: Vec<SubbandReport>,
    pub config: EmbedConfig,
}

/// Per-bit voting totals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BitConfidence {
    pub index: usize,
    pub bit: u8,
    pub weight_one: f64,
    pub weight_zero: f64,
    pub votes: usize,
}

impl BitConfidence {
    /// Winning share of the total weight, in `[0.5, 1]` (0.5 when no weight).
    pub fn confidence(&self) -> f64 {
        let total = self.weight_one + self.weight_zero;
        if total > 0.0 {
            self.weight_one.max(self.weight_zero) / total
        } else {
            0.5
        }
    }
}

pub type BitConfidences = Vec<BitConfidence>;

/// Checks that the image decomposes and tiles cleanly under `config`.
pub fn check_geometry(width: usize, height: usize, config: &EmbedConfig) -> Result<()> {
    for side in [config.block_approx, config.block_detail] {
        if !width.is_multiple_of(2 * side) || !height.is_multiple_of(2 * side) {
            return Err(dimension(format!(
                "{width}x{height} image is not divisible by {} (twice the block side {side}); \
                 crop or pad it first",
                2 * side
            )));
        }
    }
    if !width.is_multiple_of(4) || !height.is_multiple_of(4) {
        return Err(dimension(format!("{width}x{height} image is not divisible by 4")));
    }
    Ok(())
}

#[derive(Clone, Copy)]
enum Strength {
    Fixed(f64),
    Adaptive { alpha_i: f64, params: StrengthParams },
}

fn subband_name(k: Option<usize>) -> String {
    match k {
        None => "approximate".to_string(),
        Some(d) => format!("detail{d}"),
    }
}

fn embed_subband(
    grid: &CoeffGrid,
    side: usize,
    gain: f64,
    positions: &[CoeffPos; 2],
    payload: &Watermark,
    strength: Strength,
    name: String,
) -> Result<(CoeffGrid, SubbandReport)> {
    let dct = Dct2d::new(side);
    let mut blocks = partition(grid, side)?;
    let order = serpentine_order(blocks.rows(), blocks.cols());
    let mut state: Option<StrengthState> = None;
    let (mut lo, mut hi, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
    let mut modified = 0;
    for (pos, &(r, c)) in order.iter().enumerate() {
        let block = blocks.block(r, c);
        let alpha = match strength {
            Strength::Fixed(a) => a,
            Strength::Adaptive { alpha_i, params } => {
                let cm = block_complexity(block)?;
                let next = match state {
                    None => StrengthState::start(alpha_i, cm),
                    Some(prev) => next_alpha(&prev, cm, &params),
                };
                state = Some(next);
                next.alpha_m
            }
        };
        lo = lo.min(alpha);
        hi = hi.max(alpha);
        sum += alpha;
        let mut coeffs = dct.forward(block)?;
        if embed_bit_in_place(&mut coeffs, positions, alpha / gain, payload.bit(pos % payload.len())) {
            modified += 1;
            *blocks.block_mut(r, c) = dct.inverse(&coeffs)?;
        }
    }
    let report = SubbandReport {
        subband: name,
        blocks: order.len(),
        modified_blocks: modified,
        alpha_min: lo,
        alpha_max: hi,
        alpha_mean: sum / order.len() as f64,
    };
    Ok((retile(&blocks), report))
}

/// Embeds an explicit payload.
pub fn embed_payload(
    image: &GrayImage,
    payload: &Watermark,
    config: &EmbedConfig,
    stats: &DatasetStats,
) -> Result<(GrayImage, EmbedReport)> {
    config.validate()?;
    stats.validate()?;
    let (width, height) = (image.width(), image.height());
    check_geometry(width, height, config)?;
    let plan = replication_plan(height, width, payload.len(), config)?;

    let params = config.strength;
    let mu_i = image_mean_complexity(image)?;
    let (alpha_i_approx, alpha_i_detail) = if config.adaptive {
        (initial_alpha(mu_i, stats, params.alpha0_approx), initial_alpha(mu_i, stats, params.alpha0_detail))
    } else {
        (params.alpha0_approx, params.alpha0_detail)
    };
    let strength_for = |alpha: f64| {
        if config.adaptive {
            Strength::Adaptive { alpha_i: alpha, params }
        } else {
            Strength::Fixed(alpha)
        }
    };

    let subbands = ct_decompose(image)?;
    let mut jobs: Vec<(Option<usize>, &CoeffGrid)> = vec![(None, &subbands.approximate)];
    jobs.extend(subbands.details.iter().enumerate().map(|(k, d)| (Some(k), d)));

    let results = jobs
        .par_iter()
        .map(|&(k, grid)| match k {
            None => embed_subband(
                grid,
                config.block_approx,
                config.subband_gain,
                &config.approx_positions,
                payload,
                strength_for(alpha_i_approx),
                subband_name(k),
            ),
            Some(_) => embed_subband(
                grid,
                config.block_detail,
                config.subband_gain,
                &config.detail_positions,
                payload,
                strength_for(alpha_i_detail),
                subband_name(k),
            ),
        })
        .collect::<Result<Vec<_>>>()?;

    let mut reports = Vec::with_capacity(results.len());
    let mut grids = Vec::with_capacity(results.len());
    for (g, r) in results {
        grids.push(g);
        reports.push(r);
    }
    let mut grids = grids.into_iter();
    let approximate = grids.next().expect("approximate subband");
    let details: [CoeffGrid; DIRECTIONS] = std::array::from_fn(|_| grids.next().expect("detail subband"));
    let marked = ct_reconstruct(&SubbandSet { approximate, details })?.to_image();

    let report = EmbedReport {
        width,
        height,
        payload_len: payload.len(),
        adaptive: config.adaptive,
        mu_i,
        alpha_i_approx,
        alpha_i_detail,
        plan,
        subbands: reports,
        config: *config,
    };
    Ok((marked, report))
}

/// Embeds `keystream(key, payload_len)`.
pub fn embed_image(
    image: &GrayImage,
    key: SecretKey,
    payload_len: usize,
    config: &EmbedConfig,
    stats: &DatasetStats,
) -> Result<(GrayImage, EmbedReport)> {
    let payload = keystream(key, payload_len)?;
    embed_payload(image, &payload, config, stats)
}

fn collect_votes(
    grid: &CoeffGrid,
    side: usize,
    gain: f64,
    positions: &[CoeffPos; 2],
    payload_len: usize,
) -> Result<Vec<(f64, f64, usize)>> {
    let dct = Dct2d::new(side);
    let blocks = partition(grid, side)?;
    let mut tally = vec![(0.0, 0.0, 0usize); payload_len];
    for (pos, (r, c)) in serpentine_order(blocks.rows(), blocks.cols()).into_iter().enumerate() {
        let vote = read_bit(&dct.forward(blocks.block(r, c))?, positions);
        let t = &mut tally[pos % payload_len];
        if vote.bit == 1 {
            t.0 += gain * vote.weight;
        } else {
            t.1 += gain * vote.weight;
        }
        t.2 += 1;
    }
    Ok(tally)
}

/// Blind extraction: weighted majority over every replica in the
/// approximate and detail subbands. The key only selects which payload the
/// caller compares against; block positions depend on the scan alone.
pub fn extract_payload(
    image: &GrayImage,
    payload_len: usize,
    config: &EmbedConfig,
) -> Result<(Watermark, BitConfidences)> {
    config.validate()?;
    if payload_len == 0 {
        return Err(input("payload length must be at least 1"));
    }
    check_geometry(image.width(), image.height(), config)?;
    let subbands = ct_decompose(image)?;
    let mut jobs: Vec<(&CoeffGrid, usize, &[CoeffPos; 2])> =
        vec![(&subbands.approximate, config.block_approx, &config.approx_positions)];
    jobs.extend(subbands.details.iter().map(|d| (d, config.block_detail, &config.detail_positions)));
    let tallies = jobs
        .par_iter()
        .map(|&(g, side, pos)| collect_votes(g, side, config.subband_gain, pos, payload_len))
        .collect::<Result<Vec<_>>>()?;

    let mut confidences = Vec::with_capacity(payload_len);
    let mut bits = Vec::with_capacity(payload_len);
    for index in 0..payload_len {
        let (mut one, mut zero, mut votes) = (0.0, 0.0, 0);
        for t in &tallies {
            one += t[index].0;
            zero += t[index].1;
            votes += t[index].2;
        }
        let bit = u8::from(one > zero);
        bits.push(bit);
        confidences.push(BitConfidence { index, bit, weight_one: one, weight_zero: zero, votes });
    }
    Ok((Watermark::new(bits)?, confidences))
}

pub fn extract_image(
    image: &GrayImage,
    _key: SecretKey,
    payload_len: usize,
    config: &EmbedConfig,
) -> Result<(Watermark, BitConfidences)> {
    extract_payload(image, payload_len, config)
}
