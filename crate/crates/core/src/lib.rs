//! Core library for ward-camera stream analytics: shared domain types,
//! stream/event ingestion, clinical window alignment, and per-window
//! occupancy metrics.
//!
//! The pipeline shape is: [`ingest`] parses detection streams and clinical
//! event files into a [`ingest::CohortBundle`]; [`align`] maps each clinical
//! event onto the half-open frame window that precedes it; [`metrics`]
//! reduces each window to visitation mean/variance and the lying-in-bed
//! proportion. [`domain`] holds the types and labeling rules everything else
//! shares, [`config`] reads plain-text `key = value` overrides, and [`exec`]
//! provides the data-parallel map that downstream crates use (rayon-backed
//! when the `parallel` feature is on, plain iteration otherwise — identical
//! output either way).

pub mod align;
pub mod config;
pub mod domain;
pub mod exec;
pub mod ingest;
pub mod metrics;

pub use align::{AlignedWindow, ExclusionReport, WindowPolicy, WindowSpan};
pub use domain::{DomainError, Timestamp};
pub use ingest::{CohortBundle, IngestError, ValidationReport};
pub use metrics::{CountingPolicy, MetricsError, WindowMetrics};
