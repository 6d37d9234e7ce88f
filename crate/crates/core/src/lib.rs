//! Blind adaptive image watermarking in a cascaded contourlet + DCT domain.
//!
//! The embedding strength is chosen at two levels: an initial strength per
//! image from its mean pixel complexity relative to a reference dataset,
//! then a per-block strength that follows the relative change of block
//! complexity along a serpentine scan, clamped around the initial value.

pub mod attacks;
pub mod bench;
pub mod codec;
pub mod complexity;
pub mod error;
pub mod image;
pub mod metrics;
pub mod transforms;

pub use crate::codec::{
    embed_image, embed_payload, extract_image, extract_payload, keystream, EmbedConfig, EmbedReport, SecretKey,
    Watermark,
};
pub use crate::complexity::{DatasetStats, StrengthParams};
pub use crate::error::{Error, Result};
pub use crate::image::{CoeffGrid, GrayImage};
