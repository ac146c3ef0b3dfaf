//! Core of the emotion analysis platform: resource loading, the rule-based
//! analyzer, stream ingestion, regional aggregation and precision evaluation.

pub mod aggregate;
pub mod analyzer;
pub mod evalkit;
mod frame;
pub mod ingest;
pub mod lexicon;
pub mod model;

pub use frame::CorruptSnapshot;
