//! Grayscale images, real-valued coefficient grids and block tiling.
//!
//! Grids are row-major. Coordinates are `(row, col)` throughout; `width` is
//! the number of columns and `height` the number of rows.

use std::path::Path;

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{DynamicImage, ImageBuffer, Luma};
use serde::{Deserialize, Serialize};

use crate::error::{dimension, input, Result};

/// 8-bit luminance image.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GrayImage {
    width: usize,
    height: usize,
    samples: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, samples: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(dimension(format!("image must be non-empty, got {width}x{height}")));
        }
        if samples.len() != width * height {
            return Err(dimension(format!("{} samples do not fill a {width}x{height} image", samples.len())));
        }
        Ok(Self { width, height, samples })
    }

    /// Image with every sample set to `value`.
    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        assert!(width > 0 && height > 0, "image must be non-empty");
        Self { width, height, samples: vec![value; width * height] }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        assert!(width > 0 && height > 0, "image must be non-empty");
        let mut samples = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                samples.push(f(r, c));
            }
        }
        Self { width, height, samples }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<u8> {
        self.samples
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.samples[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        self.samples[row * self.width + col] = value;
    }

    pub fn same_dimensions(&self, other: &GrayImage) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// Converts any decoded image to luminance with ITU-R BT.601 weights.
    pub fn from_dynamic(img: &DynamicImage) -> Self {
        match img {
            DynamicImage::ImageLuma8(buf) => {
                Self { width: buf.width() as usize, height: buf.height() as usize, samples: buf.as_raw().clone() }
            }
            other => {
                let rgb = other.to_rgb8();
                let samples = rgb
                    .pixels()
                    .map(|p| {
                        let [r, g, b] = p.0;
                        let y = 0.299 * f64::from(r) + 0.587 * f64::from(g) + 0.114 * f64::from(b);
                        y.round().clamp(0.0, 255.0) as u8
                    })
                    .collect();
                Self { width: rgb.width() as usize, height: rgb.height() as usize, samples }
            }
        }
    }

    pub fn to_luma8(&self) -> ImageBuffer<Luma<u8>, Vec<u8>> {
        ImageBuffer::from_raw(self.width as u32, self.height as u32, self.samples.clone())
            .expect("sample count matches dimensions")
    }

    /// Loads PNG, PGM or any other format the `image` crate can decode.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let img = image::open(path.as_ref())?;
        Ok(Self::from_dynamic(&img))
    }

    /// Writes binary PGM (P5) for `.pgm`/`.pnm` paths and PNG otherwise.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).unwrap_or_default();
        match ext.as_str() {
            "pgm" | "pnm" => {
                let file = std::io::BufWriter::new(std::fs::File::create(path)?);
                let encoder = PnmEncoder::new(file).with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary));
                self.to_luma8().write_with_encoder(encoder)?;
            }
            _ => self.to_luma8().save_with_format(path, image::ImageFormat::Png)?,
        }
        Ok(())
    }

    pub fn to_coeffs(&self) -> CoeffGrid {
        CoeffGrid {
            width: self.width,
            height: self.height,
            values: self.samples.iter().map(|&v| f64::from(v)).collect(),
        }
    }
}

/// Rounds to nearest and clamps into `[0, 255]`.
#[inline]
pub fn quantize(v: f64) -> u8 {
    if v.is_nan() {
        return 0;
    }
    v.round().clamp(0.0, 255.0) as u8
}

/// Real-valued 2-D grid (subband, DCT block, residual).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoeffGrid {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl CoeffGrid {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(dimension(format!("grid must be non-empty, got {width}x{height}")));
        }
        if values.len() != width * height {
            return Err(dimension(format!("{} values do not fill a {width}x{height} grid", values.len())));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(input(format!("grid values must be finite, found {bad}")));
        }
        Ok(Self { width, height, values })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "grid must be non-empty");
        Self { width, height, values: vec![0.0; width * height] }
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        assert!(width > 0 && height > 0, "grid must be non-empty");
        Self { width, height, values: vec![value; width * height] }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(width > 0 && height > 0, "grid must be non-empty");
        let mut values = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                values.push(f(r, c));
            }
        }
        Self { width, height, values }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.values[row * self.width + col] = value;
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.width..(row + 1) * self.width]
    }

    pub fn same_dimensions(&self, other: &CoeffGrid) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub fn is_square(&self) -> bool {
        self.width == self.height
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> CoeffGrid {
        CoeffGrid { width: self.width, height: self.height, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_with(&self, other: &CoeffGrid, f: impl Fn(f64, f64) -> f64) -> Result<CoeffGrid> {
        if !self.same_dimensions(other) {
            return Err(dimension(format!(
                "grid sizes differ: {}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )));
        }
        Ok(CoeffGrid {
            width: self.width,
            height: self.height,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn sum_squares(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn rms(&self) -> f64 {
        (self.sum_squares() / self.values.len() as f64).sqrt()
    }

    /// Rounded, clamped 8-bit write-back.
    pub fn to_image(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            samples: self.values.iter().map(|&v| quantize(v)).collect(),
        }
    }
}

/// Relative RMS error `||a - b|| / ||a||` (absolute RMS when `a` is zero).
pub fn relative_rms(reference: &CoeffGrid, other: &CoeffGrid) -> f64 {
    assert!(reference.same_dimensions(other));
    let err: f64 = reference.values.iter().zip(&other.values).map(|(a, b)| (a - b) * (a - b)).sum();
    let norm = reference.sum_squares();
    if norm == 0.0 {
        (err / reference.values.len() as f64).sqrt()
    } else {
        (err / norm).sqrt()
    }
}

/// Non-overlapping square tiles of a grid, stored row-major by block index.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockGrid {
    block_side: usize,
    rows: usize,
    cols: usize,
    blocks: Vec<CoeffGrid>,
}

impl BlockGrid {
    pub fn block_side(&self) -> usize {
        self.block_side
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block(&self, row: usize, col: usize) -> &CoeffGrid {
        &self.blocks[row * self.cols + col]
    }

    pub fn block_mut(&mut self, row: usize, col: usize) -> &mut CoeffGrid {
        &mut self.blocks[row * self.cols + col]
    }

    pub fn blocks(&self) -> &[CoeffGrid] {
        &self.blocks
    }
}

/// Tiles `grid` into `block_side`-square blocks. Both dimensions must be
/// multiples of `block_side`; there is no implicit padding.
pub fn partition(grid: &CoeffGrid, block_side: usize) -> Result<BlockGrid> {
    if block_side == 0 {
        return Err(input("block side must be positive"));
    }
    if !grid.width.is_multiple_of(block_side) || !grid.height.is_multiple_of(block_side) {
        return Err(dimension(format!(
            "{}x{} grid is not divisible into {block_side}x{block_side} blocks",
            grid.width, grid.height
        )));
    }
    let rows = grid.height / block_side;
    let cols = grid.width / block_side;
    let mut blocks = Vec::with_capacity(rows * cols);
    for br in 0..rows {
        for bc in 0..cols {
            let mut values = Vec::with_capacity(block_side * block_side);
            for r in 0..block_side {
                let start = (br * block_side + r) * grid.width + bc * block_side;
                values.extend_from_slice(&grid.values[start..start + block_side]);
            }
            blocks.push(CoeffGrid { width: block_side, height: block_side, values });
        }
    }
    Ok(BlockGrid { block_side, rows, cols, blocks })
}

/// Inverse of [`partition`].
pub fn retile(blocks: &BlockGrid) -> CoeffGrid {
    let side = blocks.block_side;
    let width = blocks.cols * side;
    let height = blocks.rows * side;
    let mut values = vec![0.0; width * height];
    for br in 0..blocks.rows {
        for bc in 0..blocks.cols {
            let block = blocks.block(br, bc);
            for r in 0..side {
                let start = (br * side + r) * width + bc * side;
                values[start..start + side].copy_from_slice(block.row(r));
            }
        }
    }
    CoeffGrid { width, height, values }
}

/// Boustrophedon block order: even rows (first, third, ... in 1-based
/// counting) left to right, odd rows right to left.
pub fn serpentine_order(rows: usize, cols: usize) -> Vec<(usize, usize)> {
    let mut order = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        if r % 2 == 0 {
            order.extend((0..cols).map(|c| (r, c)));
        } else {
            order.extend((0..cols).rev().map(|c| (r, c)));
        }
    }
    order
}
