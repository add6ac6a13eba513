//! Detection-quality evaluation for posture-detection streams.
//!
//! Reproduces the study protocol end to end: box geometry ([`geometry::iou`],
//! [`geometry::ciou`]), per-frame confidence-greedy matching at an IoU
//! threshold ([`matching::match_detections`]), all-points average precision
//! and max-F1 operating points over predictions pooled across frames
//! ([`ap`]), patient-grouped k-fold splitting with a leakage guarantee
//! ([`folds`]), and cross-fold aggregation into a mean/std report
//! ([`report::evaluate_folds`]). Prediction and ground-truth files reuse the
//! ingest detection-stream format; [`samples`] joins the two streams into
//! per-frame evaluation samples.

pub mod ap;
pub mod folds;
pub mod geometry;
pub mod matching;
pub mod report;
pub mod samples;

use thiserror::Error;
use wardlens_core::domain::PatientId;

pub use ap::OperatingPoint;
pub use folds::FoldSpec;
pub use report::{evaluate_folds, EvalReport};
pub use samples::EvalSample;

/// Evaluation failures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    /// A zero-area box reached the geometry layer (unreachable for boxes
    /// built through the validated constructor).
    #[error("degenerate zero-area box")]
    DegenerateBox,
    /// An IoU threshold outside `(0, 1]`.
    #[error("IoU threshold {threshold} outside (0, 1]")]
    BadThreshold {
        /// The rejected threshold.
        threshold: f64,
    },
    /// Average precision is undefined without ground truth.
    #[error("no ground-truth instances for the class")]
    NoGroundTruth,
    /// More folds requested than there are patients to spread over them.
    #[error("cannot split {patients} patients into {k} folds")]
    FoldCountExceedsPatients {
        /// Requested fold count.
        k: usize,
        /// Available patients.
        patients: usize,
    },
    /// Zero folds requested.
    #[error("fold count must be at least 1")]
    ZeroFolds,
    /// A fold whose train and test sets overlap.
    #[error("fold {index}: patient `{patient_id}` is in both train and test")]
    TrainTestOverlap {
        /// Fold index.
        index: usize,
        /// The offending patient.
        patient_id: PatientId,
    },
    /// The same patient in more than one test fold.
    #[error("leakage detected: patient `{patient_id}` appears in multiple test folds")]
    Leakage {
        /// The offending patient.
        patient_id: PatientId,
    },
    /// Cross-fold aggregation needs at least two folds.
    #[error("need at least 2 folds, got {folds}")]
    TooFewFolds {
        /// Supplied fold count.
        folds: usize,
    },
    /// An evaluation with no classes to evaluate.
    #[error("no classes to evaluate")]
    NoClasses,
}
