//! Maps each clinical event onto the half-open frame window that precedes
//! it, and selects the frames inside that window.
//!
//! Window placement is policy-driven: pain looks at `[-30 min, -15 min)`
//! before the score, delirium at `[-60 min, -15 min)` before the
//! assessment, and acuity at the full four-hour interval `[-4 h, 0)` ending
//! at the record timestamp. Pain and delirium windows must end at least 15
//! minutes before their event — the bias-exclusion zone around the bedside
//! interaction that produced the record — and the policy refuses any
//! override that violates it. Spans are half-open everywhere so adjacent
//! acuity intervals never double-count a frame.

use chrono::Duration;
use thiserror::Error;

use crate::domain::{
    classify_phase, delirium_label, AcuityLabel, DeliriumStatus, DetectionFrame, OutcomeKind,
    PainLevel, PatientId, Phase, Timestamp,
};
use crate::ingest::CohortBundle;

/// Policy-validation failures.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlignError {
    /// A window whose start does not precede its end.
    #[error("window span must satisfy start < end, got {start_seconds}s..{end_seconds}s")]
    EmptySpan {
        /// Offset start, seconds relative to the event.
        start_seconds: i64,
        /// Offset end, seconds relative to the event.
        end_seconds: i64,
    },
    /// A pain or delirium window reaching into the 15-minute bias-exclusion
    /// zone before the event.
    #[error("{kind} window must end at or before -900s (15-minute exclusion), got {end_seconds}s")]
    ExclusionViolated {
        /// Which outcome the offending override targets.
        kind: &'static str,
        /// Offset end, seconds relative to the event.
        end_seconds: i64,
    },
    /// A minimum frame count that would admit empty windows.
    #[error("min_frames must be at least 1")]
    ZeroMinFrames,
}

/// Signed offsets (relative to the event timestamp) delimiting a window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowOffsets {
    /// Start offset (inclusive bound of the half-open span).
    pub start: Duration,
    /// End offset (exclusive bound of the half-open span).
    pub end: Duration,
}

/// Frames must precede pain/delirium events by at least this long.
fn bias_exclusion() -> Duration {
    Duration::minutes(15)
}

/// Per-outcome window offsets plus the minimum frame count a window needs
/// to be admitted. Construct with [`WindowPolicy::default`] and adjust via
/// the validating `with_*` methods.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowPolicy {
    pain: WindowOffsets,
    delirium: WindowOffsets,
    acuity: WindowOffsets,
    min_frames: usize,
}

impl Default for WindowPolicy {
    /// Pain `[-30 min, -15 min)`, delirium `[-60 min, -15 min)`, acuity
    /// `[-4 h, 0)`, minimum 60 frames (one minute of coverage).
    fn default() -> Self {
        WindowPolicy {
            pain: WindowOffsets {
                start: Duration::minutes(-30),
                end: Duration::minutes(-15),
            },
            delirium: WindowOffsets {
                start: Duration::minutes(-60),
                end: Duration::minutes(-15),
            },
            acuity: WindowOffsets {
                start: Duration::hours(-4),
                end: Duration::zero(),
            },
            min_frames: 60,
        }
    }
}

impl WindowPolicy {
    fn validate(
        kind: &'static str,
        offsets: WindowOffsets,
        exclusion: bool,
    ) -> Result<WindowOffsets, AlignError> {
        if offsets.start >= offsets.end {
            return Err(AlignError::EmptySpan {
                start_seconds: offsets.start.num_seconds(),
                end_seconds: offsets.end.num_seconds(),
            });
        }
        if exclusion && offsets.end > -bias_exclusion() {
            return Err(AlignError::ExclusionViolated {
                kind,
                end_seconds: offsets.end.num_seconds(),
            });
        }
        Ok(offsets)
    }

    /// Overrides the pain window (must respect the 15-minute exclusion).
    pub fn with_pain(mut self, offsets: WindowOffsets) -> Result<Self, AlignError> {
        self.pain = Self::validate("pain", offsets, true)?;
        Ok(self)
    }

    /// Overrides the delirium window (must respect the 15-minute exclusion).
    pub fn with_delirium(mut self, offsets: WindowOffsets) -> Result<Self, AlignError> {
        self.delirium = Self::validate("delirium", offsets, true)?;
        Ok(self)
    }

    /// Overrides the acuity window (interval-valued outcome, no exclusion).
    pub fn with_acuity(mut self, offsets: WindowOffsets) -> Result<Self, AlignError> {
        self.acuity = Self::validate("acuity", offsets, false)?;
        Ok(self)
    }

    /// Overrides the minimum admitted frame count (≥ 1).
    pub fn with_min_frames(mut self, min_frames: usize) -> Result<Self, AlignError> {
        if min_frames == 0 {
            return Err(AlignError::ZeroMinFrames);
        }
        self.min_frames = min_frames;
        Ok(self)
    }

    /// The offsets for one outcome kind.
    pub fn offsets(&self, kind: OutcomeKind) -> WindowOffsets {
        match kind {
            OutcomeKind::Pain => self.pain,
            OutcomeKind::Delirium => self.delirium,
            OutcomeKind::Acuity => self.acuity,
        }
    }

    /// Minimum frames a window needs to be admitted.
    pub fn min_frames(&self) -> usize {
        self.min_frames
    }
}

/// A half-open `[start, end)` slice of the timeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSpan {
    /// Inclusive start.
    pub start: Timestamp,
    /// Exclusive end.
    pub end: Timestamp,
}

impl WindowSpan {
    /// True iff `start <= t < end`.
    pub fn contains(&self, t: &Timestamp) -> bool {
        self.start <= *t && *t < self.end
    }
}

/// Places the window for one event: `[t + offset_start, t + offset_end)`.
pub fn align_window(kind: OutcomeKind, event: &Timestamp, policy: &WindowPolicy) -> WindowSpan {
    let offsets = policy.offsets(kind);
    WindowSpan {
        start: *event + offsets.start,
        end: *event + offsets.end,
    }
}

/// Selects exactly the frames whose timestamps fall in `span`, as a
/// contiguous slice of the (sorted) patient stream. Two binary searches, so
/// the cost is logarithmic in the stream length plus nothing — the result
/// borrows, it does not copy.
pub fn select_frames<'a>(frames: &'a [DetectionFrame], span: &WindowSpan) -> &'a [DetectionFrame] {
    let lo = frames.partition_point(|f| f.timestamp < span.start);
    let hi = frames.partition_point(|f| f.timestamp < span.end);
    &frames[lo..hi]
}

/// The outcome label attached to an aligned window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventLabel {
    /// Fine-grained pain level (coarse group derivable via
    /// [`PainLevel::group`]).
    Pain(PainLevel),
    /// Stability label.
    Acuity(AcuityLabel),
    /// Delirium status (possibly `Excluded`).
    Delirium(DeliriumStatus),
}

/// One clinical event with its selected frame window. Borrows the bundle;
/// construction copies nothing but the label and span.
#[derive(Debug, Clone, Copy)]
pub struct AlignedWindow<'a> {
    /// Which outcome stream the event came from.
    pub kind: OutcomeKind,
    /// The patient the event and frames belong to.
    pub patient_id: &'a PatientId,
    /// The event timestamp the window is anchored to.
    pub event_timestamp: Timestamp,
    /// The outcome label of the event.
    pub label: EventLabel,
    /// The half-open span frames were selected from.
    pub span: WindowSpan,
    /// Day/night stratum of the *event* timestamp (never of the frames).
    pub phase: Phase,
    /// The selected frames, `policy.min_frames()` or more of them.
    pub frames: &'a [DetectionFrame],
}

/// One event that did not produce an admitted window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExcludedEvent {
    /// Which outcome stream the event came from.
    pub kind: OutcomeKind,
    /// The patient the event belongs to.
    pub patient_id: PatientId,
    /// The event timestamp.
    pub event_timestamp: Timestamp,
    /// Frames found inside the span.
    pub frame_count: usize,
    /// Why the event was excluded.
    pub reason: String,
}

/// Which events survived window construction and which did not.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExclusionReport {
    /// Windows admitted.
    pub admitted: usize,
    /// Events excluded, with reasons.
    pub excluded: Vec<ExcludedEvent>,
}

/// Builds one window per clinical event (pain, then acuity, then delirium,
/// each in record order), admitting those with at least
/// `policy.min_frames()` frames and reporting the rest.
pub fn build_windows<'a>(
    bundle: &'a CohortBundle,
    policy: &WindowPolicy,
) -> (Vec<AlignedWindow<'a>>, ExclusionReport) {
    let mut windows = Vec::new();
    let mut report = ExclusionReport::default();

    let pain = bundle
        .pain
        .iter()
        .map(|r| (OutcomeKind::Pain, &r.patient_id, r.timestamp, EventLabel::Pain(r.dvprs.level())));
    let acuity = bundle.acuity.iter().map(|r| {
        (
            OutcomeKind::Acuity,
            &r.patient_id,
            r.interval_end,
            EventLabel::Acuity(r.label()),
        )
    });
    let delirium = bundle.delirium.iter().map(|r| {
        (
            OutcomeKind::Delirium,
            &r.patient_id,
            r.timestamp,
            EventLabel::Delirium(delirium_label(r)),
        )
    });

    for (kind, patient_id, event_timestamp, label) in pain.chain(acuity).chain(delirium) {
        let span = align_window(kind, &event_timestamp, policy);
        let Some(stream) = bundle.frames.get(patient_id) else {
            report.excluded.push(ExcludedEvent {
                kind,
                patient_id: patient_id.clone(),
                event_timestamp,
                frame_count: 0,
                reason: "no frames for patient".to_owned(),
            });
            continue;
        };
        let frames = select_frames(stream, &span);
        if frames.is_empty() {
            report.excluded.push(ExcludedEvent {
                kind,
                patient_id: patient_id.clone(),
                event_timestamp,
                frame_count: 0,
                reason: "no coverage".to_owned(),
            });
            continue;
        }
        if frames.len() < policy.min_frames() {
            report.excluded.push(ExcludedEvent {
                kind,
                patient_id: patient_id.clone(),
                event_timestamp,
                frame_count: frames.len(),
                reason: format!(
                    "below min_frames ({} < {})",
                    frames.len(),
                    policy.min_frames()
                ),
            });
            continue;
        }
        report.admitted += 1;
        windows.push(AlignedWindow {
            kind,
            patient_id,
            event_timestamp,
            label,
            span,
            phase: classify_phase(&event_timestamp),
            frames,
        });
    }
    (windows, report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Dvprs, PainRecord};
    use crate::ingest::parse_detection_stream;
    use chrono::DateTime;

    fn ts(s: &str) -> Timestamp {
        DateTime::parse_from_rfc3339(s).unwrap()
    }

    #[test]
    fn default_windows_match_the_clinical_offsets() {
        let policy = WindowPolicy::default();
        let pain = align_window(OutcomeKind::Pain, &ts("2023-05-02T14:00:00-04:00"), &policy);
        assert_eq!(pain.start, ts("2023-05-02T13:30:00-04:00"));
        assert_eq!(pain.end, ts("2023-05-02T13:45:00-04:00"));

        let delirium = align_window(
            OutcomeKind::Delirium,
            &ts("2023-05-02T14:00:00-04:00"),
            &policy,
        );
        assert_eq!(delirium.start, ts("2023-05-02T13:00:00-04:00"));
        assert_eq!(delirium.end, ts("2023-05-02T13:45:00-04:00"));

        let acuity = align_window(OutcomeKind::Acuity, &ts("2023-05-02T16:00:00-04:00"), &policy);
        assert_eq!(acuity.start, ts("2023-05-02T12:00:00-04:00"));
        assert_eq!(acuity.end, ts("2023-05-02T16:00:00-04:00"));
    }

    #[test]
    fn policy_rejects_exclusion_violations_and_empty_spans() {
        let policy = WindowPolicy::default();
        let err = policy
            .clone()
            .with_pain(WindowOffsets {
                start: Duration::minutes(-30),
                end: Duration::minutes(-10),
            })
            .unwrap_err();
        assert!(matches!(err, AlignError::ExclusionViolated { kind: "pain", .. }));

        let err = policy
            .clone()
            .with_delirium(WindowOffsets {
                start: Duration::minutes(-15),
                end: Duration::minutes(-15),
            })
            .unwrap_err();
        assert!(matches!(err, AlignError::EmptySpan { .. }));

        // Acuity has no exclusion: ending at the event is fine.
        assert!(policy
            .clone()
            .with_acuity(WindowOffsets {
                start: Duration::hours(-8),
                end: Duration::zero(),
            })
            .is_ok());

        assert_eq!(
            policy.with_min_frames(0).unwrap_err(),
            AlignError::ZeroMinFrames
        );
    }

    fn one_fps_frames(patient: &str, start: &str, seconds: usize) -> Vec<DetectionFrame> {
        let start = ts(start);
        (0..seconds)
            .map(|i| DetectionFrame {
                patient_id: PatientId::new(patient).unwrap(),
                timestamp: start + Duration::seconds(i as i64),
                detections: Vec::new(),
            })
            .collect()
    }

    #[test]
    fn select_frames_honors_half_open_bounds() {
        let frames = one_fps_frames("P01", "2023-05-02T13:00:00-04:00", 3600);
        let span = WindowSpan {
            start: ts("2023-05-02T13:30:00-04:00"),
            end: ts("2023-05-02T13:45:00-04:00"),
        };
        let selected = select_frames(&frames, &span);
        assert_eq!(selected.len(), 900);
        assert_eq!(selected[0].timestamp, span.start);
        assert_eq!(selected[899].timestamp, span.end - Duration::seconds(1));
        assert!(span.contains(&selected[0].timestamp));
        assert!(!span.contains(&span.end));

        let before = WindowSpan {
            start: ts("2023-05-02T10:00:00-04:00"),
            end: ts("2023-05-02T10:15:00-04:00"),
        };
        assert!(select_frames(&frames, &before).is_empty());
    }

    #[test]
    fn build_windows_admits_covered_events_and_reports_the_rest() {
        let text = |p: &str, start: &str, n: usize| {
            one_fps_frames(p, start, n)
                .iter()
                .map(|f| format!("{}\t{}\t\n", f.patient_id, f.timestamp.to_rfc3339()))
                .collect::<String>()
        };
        // P01 covers 13:00-14:00; P02 covers only 30 s of its pain window.
        let mut stream = text("P01", "2023-05-02T13:00:00-04:00", 3600);
        stream.push_str(&text("P02", "2023-05-02T13:30:00-04:00", 30));
        let (frames, _) = parse_detection_stream(stream.as_bytes(), &Default::default()).unwrap();

        let record = |p: &str, t: &str, score: i64| PainRecord {
            patient_id: PatientId::new(p).unwrap(),
            timestamp: ts(t),
            dvprs: Dvprs::new(score).unwrap(),
        };
        let bundle = CohortBundle {
            frames,
            pain: vec![
                record("P01", "2023-05-02T14:00:00-04:00", 3),
                record("P02", "2023-05-02T14:00:00-04:00", 8),
                record("P01", "2023-05-02T20:00:00-04:00", 0),
                record("P03", "2023-05-02T14:00:00-04:00", 5),
            ],
            ..CohortBundle::default()
        };
        let (windows, report) = build_windows(&bundle, &WindowPolicy::default());

        assert_eq!(windows.len(), 1);
        assert_eq!(report.admitted, 1);
        assert_eq!(windows[0].frames.len(), 900);
        assert_eq!(windows[0].label, EventLabel::Pain(PainLevel::Mild));
        assert_eq!(windows[0].phase, Phase::Day);

        assert_eq!(report.excluded.len(), 3);
        assert!(report.excluded[0].reason.contains("below min_frames (30 < 60)"));
        assert_eq!(report.excluded[1].reason, "no coverage");
        assert_eq!(report.excluded[2].reason, "no frames for patient");
    }

    #[test]
    fn pain_windows_never_touch_the_exclusion_zone() {
        let frames = one_fps_frames("P01", "2023-05-02T13:00:00-04:00", 3600);
        let (parsed, _) = parse_detection_stream(
            frames
                .iter()
                .map(|f| format!("{}\t{}\t\n", f.patient_id, f.timestamp.to_rfc3339()))
                .collect::<String>()
                .as_bytes(),
            &Default::default(),
        )
        .unwrap();
        let event = ts("2023-05-02T14:00:00-04:00");
        let bundle = CohortBundle {
            frames: parsed,
            pain: vec![PainRecord {
                patient_id: PatientId::new("P01").unwrap(),
                timestamp: event,
                dvprs: Dvprs::new(2).unwrap(),
            }],
            ..CohortBundle::default()
        };
        let (windows, _) = build_windows(&bundle, &WindowPolicy::default());
        let last = windows[0].frames.last().unwrap().timestamp;
        assert!(event - last >= Duration::minutes(15));
    }

    #[test]
    fn phase_comes_from_the_event_not_the_frames() {
        // Event at 19:30 (Night); its pain window [19:00, 19:15) is also
        // night here, but an event at 07:10 (Day) has a window entirely in
        // the night and must still be Day.
        let frames = one_fps_frames("P01", "2023-05-02T06:30:00-04:00", 3600);
        let (parsed, _) = parse_detection_stream(
            frames
                .iter()
                .map(|f| format!("{}\t{}\t\n", f.patient_id, f.timestamp.to_rfc3339()))
                .collect::<String>()
                .as_bytes(),
            &Default::default(),
        )
        .unwrap();
        let bundle = CohortBundle {
            frames: parsed,
            pain: vec![PainRecord {
                patient_id: PatientId::new("P01").unwrap(),
                timestamp: ts("2023-05-02T07:10:00-04:00"),
                dvprs: Dvprs::new(2).unwrap(),
            }],
            ..CohortBundle::default()
        };
        let (windows, _) = build_windows(&bundle, &WindowPolicy::default());
        assert_eq!(windows[0].phase, Phase::Day);
        assert!(windows[0]
            .frames
            .iter()
            .all(|f| classify_phase(&f.timestamp) == Phase::Night));
    }
}
