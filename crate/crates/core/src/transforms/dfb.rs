//! Two-level, four-direction filter bank.
//!
//! Each level is a two-channel quincunx filter bank built from the 9-7
//! lifting steps with the one-dimensional neighbour pair replaced by the
//! four nearest lattice neighbours. Checkerboard sign modulation of those
//! neighbours turns the diamond-shaped split into a directional one:
//!
//! * level 1 runs on the full grid, splitting the `(r + c)` even coset from
//!   the odd one with a fan filter (horizontal neighbours `+`, vertical `-`);
//! * level 2 runs inside each coset on its diagonal neighbours, splitting
//!   each by the sign of `w_row * w_col` (`+` on the main diagonal, `-` on
//!   the anti-diagonal).
//!
//! After both levels the four subbands are exactly the four `(row, col)`
//! parity classes of the grid, each `(M/2) x (N/2)`, so the bank is
//! critically sampled. Every step is a lifting step, so the inverse is
//! exact up to rounding.

use crate::error::{dimension, Result};
use crate::image::CoeffGrid;
use crate::transforms::extend::reflect;
use crate::transforms::filters::{LIFT_ALPHA, LIFT_BETA, LIFT_DELTA, LIFT_GAMMA, LIFT_K};

/// Number of directional subbands.
pub const DIRECTIONS: usize = 4;

/// Parity class `(row % 2, col % 2)` holding each directional subband.
///
/// Ordered by the dominant orientation of the subband's synthesis function
/// in the frequency plane (angle of `(w_row, w_col)` measured from the
/// column-frequency axis): roughly 0-45, 45-90, 90-135 and 135-180 degrees.
pub const SUBBAND_PARITY: [(usize, usize); DIRECTIONS] = [(0, 1), (1, 1), (0, 0), (1, 0)];

const FAN: [(isize, isize, f64); 4] = [(0, 1, 1.0), (0, -1, 1.0), (1, 0, -1.0), (-1, 0, -1.0)];
const QUADRANT: [(isize, isize, f64); 4] = [(1, 1, 1.0), (-1, -1, 1.0), (1, -1, -1.0), (-1, 1, -1.0)];

#[derive(Clone, Copy)]
enum Coset {
    /// `(r + c) % 2 == parity`
    Quincunx(usize),
    /// `(r % 2, c % 2) == (pr, pc)`
    Rect(usize, usize),
}

impl Coset {
    /// Rows holding members of the coset, with the first member column and
    /// the column step for that row.
    #[inline]
    fn row_members(self, r: usize) -> Option<(usize, usize)> {
        match self {
            Coset::Quincunx(p) => Some(((p + r) % 2, 2)),
            Coset::Rect(pr, pc) => (r % 2 == pr).then_some((pc, 2)),
        }
    }
}

/// One two-channel lifting stage: `low` and `high` are disjoint cosets whose
/// members are lattice neighbours of each other under `offsets`.
struct Stage {
    low: Coset,
    high: Coset,
    offsets: [(isize, isize, f64); 4],
}

const STAGES: [Stage; 3] = [
    Stage { low: Coset::Quincunx(0), high: Coset::Quincunx(1), offsets: FAN },
    Stage { low: Coset::Rect(0, 0), high: Coset::Rect(1, 1), offsets: QUADRANT },
    Stage { low: Coset::Rect(1, 0), high: Coset::Rect(0, 1), offsets: QUADRANT },
];

/// Adds `coef / 2` times the signed neighbour sum to every sample of
/// `target`. Neighbours of a coset (reflection included) always lie in the
/// partner coset, so the update can run in place.
fn lift(x: &mut CoeffGrid, target: Coset, offsets: &[(isize, isize, f64); 4], coef: f64) {
    let (w, h) = (x.width(), x.height());
    let weight = coef / 2.0;
    let v = x.values_mut();
    for r in 0..h {
        let Some((first, step)) = target.row_members(r) else { continue };
        let interior_row = r > 0 && r + 1 < h;
        for c in (first..w).step_by(step) {
            let mut acc = 0.0;
            if interior_row && c > 0 && c + 1 < w {
                for &(dr, dc, sign) in offsets {
                    acc += sign * v[(r as isize + dr) as usize * w + (c as isize + dc) as usize];
                }
            } else {
                for &(dr, dc, sign) in offsets {
                    acc += sign * v[reflect(r as isize + dr, h) * w + reflect(c as isize + dc, w)];
                }
            }
            v[r * w + c] += weight * acc;
        }
    }
}

fn scale(x: &mut CoeffGrid, target: Coset, factor: f64) {
    let (w, h) = (x.width(), x.height());
    let v = x.values_mut();
    for r in 0..h {
        let Some((first, step)) = target.row_members(r) else { continue };
        for c in (first..w).step_by(step) {
            v[r * w + c] *= factor;
        }
    }
}

fn forward_stage(x: &mut CoeffGrid, s: &Stage) {
    lift(x, s.high, &s.offsets, LIFT_ALPHA);
    lift(x, s.low, &s.offsets, LIFT_BETA);
    lift(x, s.high, &s.offsets, LIFT_GAMMA);
    lift(x, s.low, &s.offsets, LIFT_DELTA);
    scale(x, s.low, 1.0 / LIFT_K);
    scale(x, s.high, LIFT_K / 2.0);
}

fn inverse_stage(x: &mut CoeffGrid, s: &Stage) {
    scale(x, s.low, LIFT_K);
    scale(x, s.high, 2.0 / LIFT_K);
    lift(x, s.low, &s.offsets, -LIFT_DELTA);
    lift(x, s.high, &s.offsets, -LIFT_GAMMA);
    lift(x, s.low, &s.offsets, -LIFT_BETA);
    lift(x, s.high, &s.offsets, -LIFT_ALPHA);
}

fn check_dims(w: usize, h: usize) -> Result<()> {
    if !w.is_multiple_of(4) || !h.is_multiple_of(4) || w == 0 || h == 0 {
        return Err(dimension(format!("directional filter bank needs dimensions divisible by 4, got {w}x{h}")));
    }
    Ok(())
}

/// Splits a bandpass image into four directional subbands.
pub fn dfb_decompose(bandpass: &CoeffGrid) -> Result<[CoeffGrid; DIRECTIONS]> {
    check_dims(bandpass.width(), bandpass.height())?;
    let mut x = bandpass.clone();
    for stage in &STAGES {
        forward_stage(&mut x, stage);
    }
    let (hw, hh) = (x.width() / 2, x.height() / 2);
    Ok(SUBBAND_PARITY.map(|(pr, pc)| CoeffGrid::from_fn(hw, hh, |r, c| x.get(2 * r + pr, 2 * c + pc))))
}

pub fn dfb_reconstruct(subbands: &[CoeffGrid; DIRECTIONS]) -> Result<CoeffGrid> {
    let (hw, hh) = (subbands[0].width(), subbands[0].height());
    if subbands.iter().any(|s| s.width() != hw || s.height() != hh) {
        return Err(dimension("directional subbands must share one size"));
    }
    check_dims(2 * hw, 2 * hh)?;
    let mut x = CoeffGrid::zeros(2 * hw, 2 * hh);
    for (band, &(pr, pc)) in subbands.iter().zip(SUBBAND_PARITY.iter()) {
        for r in 0..hh {
            for c in 0..hw {
                x.set(2 * r + pr, 2 * c + pc, band.get(r, c));
            }
        }
    }
    for stage in STAGES.iter().rev() {
        inverse_stage(&mut x, stage);
    }
    Ok(x)
}
