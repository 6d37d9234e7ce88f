use crate::error::{dimension, Result};
use crate::image::CoeffGrid;

/// Orthonormal 2-D DCT-II for square `n x n` blocks.
#[derive(Clone, Debug)]
pub struct Dct2d {
    n: usize,
    // basis[k * n + i] = a_k cos(pi (2i + 1) k / 2n)
    basis: Vec<f64>,
}

impl Dct2d {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "DCT size must be positive");
        let mut basis = Vec::with_capacity(n * n);
        for k in 0..n {
            let a = if k == 0 { (1.0 / n as f64).sqrt() } else { (2.0 / n as f64).sqrt() };
            for i in 0..n {
                let angle = std::f64::consts::PI * (2 * i + 1) as f64 * k as f64 / (2 * n) as f64;
                basis.push(a * angle.cos());
            }
        }
        Self { n, basis }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    fn check(&self, block: &CoeffGrid) -> Result<()> {
        if block.width() != self.n || block.height() != self.n {
            return Err(dimension(format!(
                "expected a {0}x{0} block, got {1}x{2}",
                self.n,
                block.width(),
                block.height()
            )));
        }
        Ok(())
    }

    /// `C X C^T`
    pub fn forward(&self, block: &CoeffGrid) -> Result<CoeffGrid> {
        self.check(block)?;
        Ok(self.apply(block, false))
    }

    /// `C^T Y C`
    pub fn inverse(&self, coeffs: &CoeffGrid) -> Result<CoeffGrid> {
        self.check(coeffs)?;
        Ok(self.apply(coeffs, true))
    }

    fn apply(&self, x: &CoeffGrid, inverse: bool) -> CoeffGrid {
        let n = self.n;
        let b = |k: usize, i: usize| if inverse { self.basis[i * n + k] } else { self.basis[k * n + i] };
        // rows: t[r][k] = sum_i x[r][i] b(k, i)
        let mut t = vec![0.0; n * n];
        for r in 0..n {
            let row = x.row(r);
            for k in 0..n {
                t[r * n + k] = row.iter().enumerate().map(|(i, v)| v * b(k, i)).sum();
            }
        }
        // columns: y[k][c] = sum_r b(k, r) t[r][c]
        CoeffGrid::from_fn(n, n, |k, c| (0..n).map(|r| b(k, r) * t[r * n + c]).sum())
    }
}

pub fn dct2(block: &CoeffGrid) -> Result<CoeffGrid> {
    if !block.is_square() {
        return Err(dimension(format!("DCT needs a square block, got {}x{}", block.width(), block.height())));
    }
    Dct2d::new(block.width()).forward(block)
}

pub fn idct2(coeffs: &CoeffGrid) -> Result<CoeffGrid> {
    if !coeffs.is_square() {
        return Err(dimension(format!("inverse DCT needs a square block, got {}x{}", coeffs.width(), coeffs.height())));
    }
    Dct2d::new(coeffs.width()).inverse(coeffs)
}
