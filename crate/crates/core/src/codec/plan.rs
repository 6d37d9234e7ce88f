use serde::{Deserialize, Serialize};

use crate::codec::config::EmbedConfig;
use crate::error::{input, Error, Result};

/// Block counts and replication degrees for an `M x N` cover image.
///
/// The approximate scale and every detail subband are `(M/2) x (N/2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicationPlan {
    /// Pixels per payload bit, `M N / L_w`.
    pub rho: f64,
    pub blocks_approx: usize,
    pub blocks_per_detail_subband: usize,
    /// Payload copies in the approximate scale, `rho / (4 L_AB^2)`.
    pub redundancy_approx: f64,
    /// Payload copies across all four detail subbands, `rho / L_DB^2`.
    pub redundancy_detail: f64,
}

impl ReplicationPlan {
    pub fn total_replicas(&self) -> f64 {
        self.redundancy_approx + self.redundancy_detail
    }
}

pub fn replication_plan(
    height: usize,
    width: usize,
    payload_len: usize,
    config: &EmbedConfig,
) -> Result<ReplicationPlan> {
    if payload_len == 0 {
        return Err(input("payload length must be at least 1"));
    }
    let (la, ld) = (config.block_approx, config.block_detail);
    if la == 0 || ld == 0 {
        return Err(input("block sides must be positive"));
    }
    let pixels = height * width;
    let rho = pixels as f64 / payload_len as f64;
    let blocks_approx = (height / 2 / la) * (width / 2 / la);
    let blocks_per_detail_subband = (height / 2 / ld) * (width / 2 / ld);
    let capacity = blocks_approx.max(blocks_per_detail_subband);
    if capacity < payload_len {
        return Err(Error::Capacity { payload: payload_len, capacity });
    }
    Ok(ReplicationPlan {
        rho,
        blocks_approx,
        blocks_per_detail_subband,
        redundancy_approx: rho / (4 * la * la) as f64,
        redundancy_detail: rho / (ld * ld) as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_for_512() {
        let p = replication_plan(512, 512, 128, &EmbedConfig::default()).unwrap();
        assert_eq!(p.rho, 2048.0);
        assert_eq!(p.blocks_approx, 4096);
        assert_eq!(p.redundancy_approx, 32.0);
        assert_eq!(p.blocks_per_detail_subband, 256);
        assert_eq!(p.redundancy_detail, 8.0);
    }

    #[test]
    fn single_copy_in_approximation() {
        let p = replication_plan(512, 512, 4096, &EmbedConfig::default()).unwrap();
        assert_eq!(p.redundancy_approx, 1.0);
    }

    #[test]
    fn capacity_exceeded() {
        assert!(matches!(
            replication_plan(64, 64, 100_000, &EmbedConfig::default()),
            Err(Error::Capacity { payload: 100_000, .. })
        ));
    }
}
