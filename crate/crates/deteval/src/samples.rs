//! Evaluation samples: per-frame prediction/ground-truth pairs joined from
//! two detection streams.

use std::collections::{BTreeMap, BTreeSet};

use wardlens_core::domain::{BoundingBox, PatientId, PostureClass, Timestamp};
use wardlens_core::ingest::PatientFrames;

use crate::folds::FoldSpec;

/// One annotated box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundTruthBox {
    /// Annotated extent.
    pub bbox: BoundingBox,
    /// Annotated posture.
    pub class: PostureClass,
}

/// One predicted box with model confidence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionBox {
    /// Predicted extent.
    pub bbox: BoundingBox,
    /// Predicted posture.
    pub class: PostureClass,
    /// Model confidence in `[0, 1]`.
    pub confidence: f64,
}

/// One frame's worth of evaluation input: the annotations and the
/// predictions for the same (patient, timestamp) identity.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalSample {
    /// Room/patient the frame belongs to.
    pub patient_id: PatientId,
    /// Frame capture time.
    pub timestamp: Timestamp,
    /// Annotated boxes (possibly empty: annotated-empty room).
    pub ground_truth: Vec<GroundTruthBox>,
    /// Predicted boxes (possibly empty: nothing detected).
    pub predictions: Vec<PredictionBox>,
}

/// Joins a prediction stream and a ground-truth stream on frame identity
/// (patient, timestamp), taking the union of the two key sets: a frame
/// with annotations but no predictions scores misses, and a frame with
/// predictions but no annotations scores false positives. Samples come out
/// sorted by patient then timestamp.
pub fn join_streams(predictions: &PatientFrames, ground_truth: &PatientFrames) -> Vec<EvalSample> {
    let mut joined: BTreeMap<(&PatientId, Timestamp), EvalSample> = BTreeMap::new();
    for (patient_id, frames) in ground_truth {
        for frame in frames {
            joined.insert(
                (patient_id, frame.timestamp),
                EvalSample {
                    patient_id: patient_id.clone(),
                    timestamp: frame.timestamp,
                    ground_truth: frame
                        .detections
                        .iter()
                        .map(|d| GroundTruthBox {
                            bbox: d.bbox,
                            class: d.posture,
                        })
                        .collect(),
                    predictions: Vec::new(),
                },
            );
        }
    }
    for (patient_id, frames) in predictions {
        for frame in frames {
            let sample = joined
                .entry((patient_id, frame.timestamp))
                .or_insert_with(|| EvalSample {
                    patient_id: patient_id.clone(),
                    timestamp: frame.timestamp,
                    ground_truth: Vec::new(),
                    predictions: Vec::new(),
                });
            sample.predictions = frame
                .detections
                .iter()
                .map(|d| PredictionBox {
                    bbox: d.bbox,
                    class: d.posture,
                    confidence: d.confidence(),
                })
                .collect();
        }
    }
    joined.into_values().collect()
}

/// The classes with at least one ground-truth instance, in canonical
/// posture order — the default class set for a report.
pub fn classes_present(samples: &[EvalSample]) -> Vec<PostureClass> {
    let seen: BTreeSet<PostureClass> = samples
        .iter()
        .flat_map(|s| s.ground_truth.iter().map(|g| g.class))
        .collect();
    PostureClass::ALL
        .iter()
        .copied()
        .filter(|c| seen.contains(c))
        .collect()
}

/// All patients appearing in a sample set.
pub fn patients_present(samples: &[EvalSample]) -> BTreeSet<PatientId> {
    samples.iter().map(|s| s.patient_id.clone()).collect()
}

/// Splits samples into per-fold test sets: fold i gets the samples whose
/// patient is in fold i's test set. Order within a fold follows the input.
pub fn split_by_folds(samples: &[EvalSample], folds: &[FoldSpec]) -> Vec<Vec<EvalSample>> {
    folds
        .iter()
        .map(|fold| {
            samples
                .iter()
                .filter(|s| fold.test().contains(&s.patient_id))
                .cloned()
                .collect()
        })
        .collect()
}
