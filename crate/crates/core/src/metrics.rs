//! Per-window occupancy metrics: visitation mean, visitation variance, and
//! the lying-in-bed proportion.
//!
//! The visitation count of a frame is the number of detections whose
//! posture class is in the [`CountingPolicy`] (default: lying-in-bed and
//! standing). Mean and variance stream through Welford's update so a
//! million-frame window accumulates no cancellation error; variance is the
//! population variance (divide by N) because the window *is* the entire
//! population of observed frames. The lying proportion is frame-level: the
//! fraction of frames containing at least one lying-in-bed detection,
//! regardless of the counting policy.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::domain::{DetectionFrame, PostureClass};

/// Metric-computation failures.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    /// A window with no frames (alignment must exclude these upstream).
    #[error("empty window")]
    EmptyWindow,
    /// A counting policy naming no classes.
    #[error("counting policy must name at least one class")]
    EmptyPolicy,
}

/// The posture classes counted as "a person present" in a frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountingPolicy {
    classes: BTreeSet<PostureClass>,
}

impl Default for CountingPolicy {
    /// Lying-in-bed and standing, the two classes the visitation metrics
    /// are defined over.
    fn default() -> Self {
        CountingPolicy {
            classes: [PostureClass::LyingInBed, PostureClass::Standing]
                .into_iter()
                .collect(),
        }
    }
}

impl CountingPolicy {
    /// Builds a policy from a non-empty set of classes.
    pub fn new(classes: impl IntoIterator<Item = PostureClass>) -> Result<Self, MetricsError> {
        let classes: BTreeSet<PostureClass> = classes.into_iter().collect();
        if classes.is_empty() {
            return Err(MetricsError::EmptyPolicy);
        }
        Ok(CountingPolicy { classes })
    }

    /// True iff detections of this class count as a person.
    pub fn counts(&self, class: PostureClass) -> bool {
        self.classes.contains(&class)
    }

    /// The counted classes in canonical order.
    pub fn classes(&self) -> impl Iterator<Item = PostureClass> + '_ {
        self.classes.iter().copied()
    }
}

/// Number of detections in the frame whose posture is counted by `policy`.
pub fn person_count(frame: &DetectionFrame, policy: &CountingPolicy) -> usize {
    frame
        .detections
        .iter()
        .filter(|d| policy.counts(d.posture))
        .count()
}

/// The three per-window model metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowMetrics {
    /// Mean person count per frame.
    pub visitation_mean: f64,
    /// Population variance of the person count.
    pub visitation_variance: f64,
    /// Fraction of frames with at least one lying-in-bed detection.
    pub lying_proportion: f64,
    /// Frames the window holds (≥ 1).
    pub frame_count: usize,
}

/// Reduces a non-empty window to its metrics with a single streaming pass
/// (Welford's update for mean/variance).
pub fn window_metrics(
    frames: &[DetectionFrame],
    policy: &CountingPolicy,
) -> Result<WindowMetrics, MetricsError> {
    if frames.is_empty() {
        return Err(MetricsError::EmptyWindow);
    }
    let mut mean = 0.0f64;
    let mut m2 = 0.0f64;
    let mut lying_frames = 0usize;
    for (i, frame) in frames.iter().enumerate() {
        let count = person_count(frame, policy) as f64;
        let delta = count - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (count - mean);
        if frame
            .detections
            .iter()
            .any(|d| d.posture == PostureClass::LyingInBed)
        {
            lying_frames += 1;
        }
    }
    let n = frames.len() as f64;
    Ok(WindowMetrics {
        visitation_mean: mean,
        // Welford's m2 is non-negative up to rounding; clamp the rounding.
        visitation_variance: (m2 / n).max(0.0),
        lying_proportion: lying_frames as f64 / n,
        frame_count: frames.len(),
    })
}
