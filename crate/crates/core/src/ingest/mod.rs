//! Tweet record ingestion: JSONL parsing, region resolution, id
//! de-duplication and (optionally rate-limited) replay into a recorder.

mod dedup;
mod record;
mod replay;

pub use dedup::{DedupStore, DEFAULT_DEDUP_CAPACITY};
pub use record::{assign_region, classify_tweet, parse_record, RecordError};
pub use replay::{replay, PlanError, ReplayError, ReplayPlan, ReplaySummary, DEFAULT_BATCH_SIZE};
