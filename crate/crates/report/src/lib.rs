//! Association analysis and report rendering.
//!
//! Takes the aligned windows produced by the core crate, reduces each to
//! its [`wardlens_core::metrics::WindowMetrics`], and compares the three
//! per-window metrics (visitation average, visitation variance, lying
//! proportion) between outcome groups — pain no/mild vs moderate/severe,
//! acuity stable vs unstable, delirium non-delirious vs delirious — in
//! three strata (day, night, combined). Every comparison is a two-sided
//! Mann–Whitney U test with tie and continuity corrections; a D'Agostino
//! K² normality check is recorded as an advisory note but never switches
//! the test, so the report schema is identical whatever the data look
//! like. A four-group Kruskal–Wallis comparison over the fine-grained
//! pain levels is available separately.
//!
//! Rendering is deterministic: the same rows yield byte-identical text
//! tables, CSV, and histogram-bin output on every run.

pub mod assoc;
pub mod observe;
pub mod render;

use thiserror::Error;
use wardlens_stats::StatsError;

pub use assoc::{
    group_names, run_all_associations, run_association, run_pain_four_group, Adjustment,
    AssociationRow, GroupStats, MetricKind, Stratum, SummaryStats,
};
pub use observe::{observe_windows, WindowObservation};
pub use render::{format_p, histogram_bins, render_csv, render_text};

/// Failures of the association pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReportError {
    /// A statistical routine rejected its input.
    #[error(transparent)]
    Stats(#[from] StatsError),
    /// A window could not be reduced to metrics.
    #[error("cannot reduce a window to metrics: {0}")]
    Metrics(String),
    /// The four-group pain comparison found fewer than two populated
    /// groups.
    #[error("four-group pain comparison needs at least 2 non-empty groups, got {non_empty}")]
    TooFewPainGroups {
        /// Populated groups found.
        non_empty: usize,
    },
}
