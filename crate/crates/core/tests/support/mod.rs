#![allow(dead_code)]

pub mod corpus;
pub mod invariants;
pub mod oracle;
pub mod textgen;
