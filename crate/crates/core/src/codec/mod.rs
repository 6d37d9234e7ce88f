//! Watermark payloads, replication planning, and the embed/extract
//! pipelines over the contourlet + block-DCT domain.

pub mod config;
pub mod keystream;
pub mod plan;
pub mod scheme;

pub use config::{CoeffPos, EmbedConfig};
pub use keystream::{keystream, SecretKey, SplitMix64, Watermark};
pub use plan::{replication_plan, ReplicationPlan};
pub use scheme::{
    check_geometry, embed_bit, embed_image, embed_payload, extract_image, extract_payload, read_bit, BitConfidence,
    BitConfidences, EmbedReport, ExtractionVote, SubbandReport,
};
