use std::path::Path;

use crate::error::{dimension, Result};
use crate::image::{CoeffGrid, GrayImage};
use crate::transforms::dfb::{dfb_decompose, dfb_reconstruct, DIRECTIONS};
use crate::transforms::pyramid::{lp_decompose, lp_reconstruct};

/// One pyramid level: the approximate scale plus four directional detail
/// subbands, all `(M/2) x (N/2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubbandSet {
    pub approximate: CoeffGrid,
    pub details: [CoeffGrid; DIRECTIONS],
}

impl SubbandSet {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            approximate: CoeffGrid::zeros(width, height),
            details: std::array::from_fn(|_| CoeffGrid::zeros(width, height)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (w, h) = (self.approximate.width(), self.approximate.height());
        if self.details.iter().any(|d| d.width() != w || d.height() != h) {
            return Err(dimension("detail subbands must match the approximate scale size"));
        }
        Ok(())
    }

    /// Writes each subband as an affine-normalised 8-bit PGM for inspection.
    pub fn dump_pgm(&self, dir: impl AsRef<Path>, stem: &str) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        normalized(&self.approximate).save(dir.join(format!("{stem}_approx.pgm")))?;
        for (k, d) in self.details.iter().enumerate() {
            normalized(d).save(dir.join(format!("{stem}_dir{k}.pgm")))?;
        }
        Ok(())
    }
}

fn normalized(g: &CoeffGrid) -> GrayImage {
    let lo = g.values().iter().copied().fold(f64::INFINITY, f64::min);
    let hi = g.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    g.map(|v| (v - lo) / span * 255.0).to_image()
}

pub fn ct_decompose_grid(image: &CoeffGrid) -> Result<SubbandSet> {
    if !image.width().is_multiple_of(4) || !image.height().is_multiple_of(4) {
        return Err(dimension(format!(
            "contourlet decomposition needs dimensions divisible by 4, got {}x{}",
            image.width(),
            image.height()
        )));
    }
    let (approximate, bandpass) = lp_decompose(image)?;
    let details = dfb_decompose(&bandpass)?;
    Ok(SubbandSet { approximate, details })
}

/// Laplacian pyramid then directional filter bank on the bandpass.
pub fn ct_decompose(image: &GrayImage) -> Result<SubbandSet> {
    ct_decompose_grid(&image.to_coeffs())
}

/// Real-valued inverse; quantisation to 8 bits is left to the caller.
pub fn ct_reconstruct(subbands: &SubbandSet) -> Result<CoeffGrid> {
    subbands.validate()?;
    let bandpass = dfb_reconstruct(&subbands.details)?;
    lp_reconstruct(&subbands.approximate, &bandpass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_for_512() {
        let s = ct_decompose(&GrayImage::filled(512, 512, 0)).unwrap();
        assert_eq!((s.approximate.width(), s.approximate.height()), (256, 256));
        for d in &s.details {
            assert_eq!((d.width(), d.height()), (256, 256));
        }
    }

    #[test]
    fn constant_image_has_empty_details() {
        let s = ct_decompose(&GrayImage::filled(64, 32, 131)).unwrap();
        for d in &s.details {
            assert!(d.rms() < 1e-9);
        }
    }

    #[test]
    fn zero_subbands_reconstruct_to_zero() {
        let out = ct_reconstruct(&SubbandSet::zeros(16, 8)).unwrap();
        assert_eq!((out.width(), out.height()), (32, 16));
        assert!(out.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mismatched_subbands_rejected() {
        let mut s = SubbandSet::zeros(16, 16);
        s.details[2] = CoeffGrid::zeros(8, 16);
        assert!(matches!(ct_reconstruct(&s), Err(crate::Error::Dimension(_))));
    }

    #[test]
    fn indivisible_image_rejected() {
        assert!(ct_decompose(&GrayImage::filled(18, 16, 0)).is_err());
    }
}
