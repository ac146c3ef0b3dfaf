//! HTTP API and command-line front end over `eap-core`.

pub mod api;
pub mod cli;
