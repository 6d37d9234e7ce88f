//! Cascaded transform stack: Laplacian pyramid, directional filter bank,
//! their composition (one-level contourlet) and the orthonormal block DCT.

pub mod contourlet;
pub mod dct;
pub mod dfb;
pub mod extend;
pub mod filters;
pub mod pyramid;

pub use contourlet::{ct_decompose, ct_decompose_grid, ct_reconstruct, SubbandSet};
pub use dct::{dct2, idct2, Dct2d};
pub use dfb::{dfb_decompose, dfb_reconstruct, DIRECTIONS};
pub use filters::FilterPair;
pub use pyramid::{lp_decompose, lp_reconstruct};
