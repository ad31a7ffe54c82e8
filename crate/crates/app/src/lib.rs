//! Application layer over `pepforge-core`: configuration, JSONL record
//! schemas, the dataset pipeline stages, and the HTTP reward/advantage
//! service.

pub mod config;
pub mod pipeline;
pub mod schema;
pub mod service;
