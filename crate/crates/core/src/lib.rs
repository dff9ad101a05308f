//! Mining version-control histories for test/production co-evolution.
//!
//! The pipeline is: a normalized commit log ([`ingest`]) is replayed
//! against per-revision file contents, each touched source file is
//! classified as production or test code ([`classify`]), and the replay
//! produces an entity timeline ([`history`]) and per-commit size metrics
//! ([`metrics`]). On top of those sit phase labelling ([`phases`]),
//! per-release coverage ingestion ([`coverage`]), the test-share versus
//! coverage correlation ([`stats`]), and deterministic SVG/TSV output
//! ([`views`], [`export`]).

pub mod classify;
pub mod coverage;
pub mod export;
pub mod history;
pub mod ingest;
pub mod metrics;
pub mod phases;
pub mod stats;
pub mod synth;
pub mod views;

mod error;

pub use error::{Error, Result};
pub use ingest::{CommitRecord, ContentProvider, PathChange, ReleaseMarker, Rev};
