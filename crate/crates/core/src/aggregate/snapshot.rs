use std::collections::BTreeMap;

use thiserror::Error;

use super::{AggregateConfig, AggregateStore, BucketCounts, BucketKey};
use crate::frame::{self, CorruptSnapshot, Reader};
use crate::model::RegionCode;

const MAGIC: [u8; 4] = *b"EAPA";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RestoreError {
    #[error(transparent)]
    Corrupt(#[from] CorruptSnapshot),
    #[error("snapshot was taken with UTC offset {snapshot}s but {configured}s is configured")]
    OffsetMismatch { snapshot: i32, configured: i32 },
}

impl AggregateStore {
    /// Serializes every bucket. Writers are blocked for the duration.
    ///
    /// Payload: `utc_offset i32 | n u64 | n x (region u8 | hour i64 | 6 x u64)`,
    /// buckets in key order.
    pub fn snapshot(&self) -> Vec<u8> {
        let buckets = self.read_map();
        let mut payload = Vec::with_capacity(12 + buckets.len() * 57);
        payload.extend_from_slice(&self.config.utc_offset_secs.to_le_bytes());
        payload.extend_from_slice(&(buckets.len() as u64).to_le_bytes());
        for (key, counts) in buckets.iter() {
            payload.push(key.region.ordinal());
            payload.extend_from_slice(&key.hour.to_le_bytes());
            for c in counts.counts() {
                payload.extend_from_slice(&c.to_le_bytes());
            }
        }
        frame::encode(MAGIC, &payload)
    }

    /// Rebuilds a store from [`AggregateStore::snapshot`] output.
    pub fn restore(bytes: &[u8], config: AggregateConfig) -> Result<Self, RestoreError> {
        let mut r = Reader::new(frame::decode(MAGIC, bytes)?);
        let offset = r.i32()?;
        if offset != config.utc_offset_secs {
            return Err(RestoreError::OffsetMismatch {
                snapshot: offset,
                configured: config.utc_offset_secs,
            });
        }
        let n = r.u64()?;
        let mut buckets = BTreeMap::new();
        let mut prev: Option<BucketKey> = None;
        for _ in 0..n {
            let region = RegionCode::from_ordinal(r.u8()?)
                .ok_or(CorruptSnapshot("region ordinal out of range"))?;
            let key = BucketKey {
                region,
                hour: r.i64()?,
            };
            if prev.is_some_and(|p| p >= key) {
                return Err(CorruptSnapshot("bucket keys out of order").into());
            }
            prev = Some(key);
            let mut counts = [0u64; 6];
            for c in counts.iter_mut() {
                *c = r.u64()?;
            }
            buckets.insert(key, BucketCounts::from_counts(counts));
        }
        r.finish()?;
        let store = AggregateStore::new(config);
        *store.buckets.write() = buckets;
        Ok(store)
    }
}
