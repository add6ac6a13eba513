//! Seeded synthetic-cohort generator.
//!
//! Builds detection streams and clinical-event files with *known* planted
//! occupancy effects, so the whole analysis pipeline can be acceptance-
//! tested without clinical data. Each outcome group (pain no/mild vs
//! moderate/severe, acuity stable vs unstable, delirium non-delirious vs
//! delirious) gets its own visitor process whose stationary mean occupancy
//! is chosen by [`config::plant_effect`]; [`generate::generate_cohort`]
//! realizes the processes as per-frame detections plus matching clinical
//! events and returns a ground-truth ledger with one row per generated
//! window. Everything is deterministic in the seed — per-patient generator
//! streams are derived as `seed ⊕ patient index`, so output bytes are
//! identical whatever the thread count.

pub mod config;
pub mod generate;

use thiserror::Error;
use wardlens_core::config::ConfigError;

pub use config::{plant_effect, GroupPlan, SynthConfig, SynthGroup};
pub use generate::{generate_cohort, Cohort, GroundTruthLedger, LedgerRow};

/// Generator configuration and feasibility failures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    /// Config-file syntax failures.
    #[error(transparent)]
    Config(#[from] ConfigError),
    /// A numeric key that did not parse.
    #[error("config key `{key}`: cannot parse `{text}`")]
    BadValue {
        /// The key being set.
        key: String,
        /// The rejected text.
        text: String,
    },
    /// A probability outside `[0, 1]`.
    #[error("{what} must be a probability in [0, 1], got {value}")]
    BadProbability {
        /// Which probability.
        what: &'static str,
        /// The rejected value.
        value: f64,
    },
    /// Patient count of zero.
    #[error("need at least one patient")]
    NoPatients,
    /// A dwell time that is non-positive or shorter than one second.
    #[error("mean dwell must be at least 1/60 minute, got {minutes}")]
    BadDwell {
        /// The rejected dwell, in minutes.
        minutes: f64,
    },
    /// Frames-per-window outside the narrowest default window.
    #[error("frames per window must be in [1, 900] (the pain window is 900 s), got {frames}")]
    BadFramesPerWindow {
        /// The rejected count.
        frames: usize,
    },
    /// A planted occupancy below the lying floor: the patient alone
    /// already contributes `lying_probability` to the mean, and visitors
    /// can only add.
    #[error(
        "group `{group}`: target occupancy {target} below lying probability {lying} — \
         visitors cannot subtract"
    )]
    InfeasibleTarget {
        /// The offending group key.
        group: &'static str,
        /// Requested stationary mean.
        target: f64,
        /// Configured lying probability.
        lying: f64,
    },
    /// An implied arrival rate beyond one visitor per second.
    #[error("group `{group}`: implied arrival rate {rate}/h exceeds 3600/h (one per second)")]
    RateTooHigh {
        /// The offending group key.
        group: &'static str,
        /// Implied arrival rate, per hour.
        rate: f64,
    },
    /// A pain score that lands in the wrong comparison bucket.
    #[error("dvprs {dvprs} does not belong to the `{group}` pain group")]
    DvprsGroupMismatch {
        /// Configured score.
        dvprs: i64,
        /// The group it was configured for.
        group: &'static str,
    },
    /// A domain-rule violation while building records (invalid score or
    /// identifier ranges).
    #[error("domain rule violated: {0}")]
    Domain(String),
}
