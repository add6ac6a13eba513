//! Flattening aligned windows into owned per-window observations.

use wardlens_core::align::{AlignedWindow, EventLabel};
use wardlens_core::domain::{OutcomeKind, PatientId, Phase, Timestamp};
use wardlens_core::exec;
use wardlens_core::metrics::{window_metrics, CountingPolicy, WindowMetrics};

use crate::ReportError;

/// One admitted window reduced to everything the association analysis
/// needs: identity, stratum, outcome label, and the three metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowObservation {
    /// Which outcome stream the window belongs to.
    pub kind: OutcomeKind,
    /// The patient the window belongs to.
    pub patient_id: PatientId,
    /// The clinical event the window is anchored to.
    pub event_timestamp: Timestamp,
    /// The outcome label of the event.
    pub label: EventLabel,
    /// Day/night stratum of the event timestamp.
    pub phase: Phase,
    /// The window's metrics.
    pub metrics: WindowMetrics,
}

/// Reduces every aligned window to an observation. The metric reduction is
/// the hot path over raw frames, so it runs through the parallel map; the
/// output order matches the input order regardless of thread count.
pub fn observe_windows(
    windows: &[AlignedWindow<'_>],
    policy: &CountingPolicy,
) -> Result<Vec<WindowObservation>, ReportError> {
    exec::par_map(windows, |window| {
        let metrics = window_metrics(window.frames, policy)
            .map_err(|e| ReportError::Metrics(e.to_string()))?;
        Ok(WindowObservation {
            kind: window.kind,
            patient_id: window.patient_id.clone(),
            event_timestamp: window.event_timestamp,
            label: window.label,
            phase: window.phase,
            metrics,
        })
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::DateTime;
    use wardlens_core::align::{build_windows, WindowPolicy};
    use wardlens_core::domain::{
        BoundingBox, Detection, DetectionFrame, Dvprs, FrameGeometry, PainRecord, PostureClass,
    };
    use wardlens_core::ingest::CohortBundle;

    fn bundle_with_one_pain_event() -> CohortBundle {
        let geometry = FrameGeometry::default();
        let patient_id = PatientId::new("P01").unwrap();
        let event: Timestamp = DateTime::parse_from_rfc3339("2023-05-02T14:00:00-04:00").unwrap();
        let bbox = BoundingBox::new(10.0, 10.0, 50.0, 90.0, &geometry).unwrap();
        let start = event - chrono::Duration::minutes(30);
        let frames: Vec<DetectionFrame> = (0..900)
            .map(|i| DetectionFrame {
                patient_id: patient_id.clone(),
                timestamp: start + chrono::Duration::seconds(i),
                detections: vec![
                    Detection::new(bbox, PostureClass::LyingInBed, 0.9).unwrap(),
                ],
            })
            .collect();
        let mut bundle = CohortBundle::default();
        bundle.frames.insert(patient_id.clone(), frames);
        bundle.pain.push(PainRecord {
            patient_id,
            timestamp: event,
            dvprs: Dvprs::new(7).unwrap(),
        });
        bundle
    }

    #[test]
    fn observation_carries_label_phase_and_metrics() {
        let bundle = bundle_with_one_pain_event();
        let policy = WindowPolicy::default();
        let (windows, exclusions) = build_windows(&bundle, &policy);
        assert_eq!(windows.len(), 1);
        assert!(exclusions.excluded.is_empty());
        let observations = observe_windows(&windows, &CountingPolicy::default()).unwrap();
        assert_eq!(observations.len(), 1);
        let obs = &observations[0];
        assert_eq!(obs.kind, OutcomeKind::Pain);
        assert_eq!(obs.phase, Phase::Day);
        // 900 frames of exactly one lying person.
        assert_eq!(obs.metrics.frame_count, 900);
        assert_eq!(obs.metrics.visitation_mean, 1.0);
        assert_eq!(obs.metrics.lying_proportion, 1.0);
    }
}
