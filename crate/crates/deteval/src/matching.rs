//! Confidence-greedy matching of predictions to ground truth within one
//! frame at an IoU threshold.

use wardlens_core::domain::PostureClass;

use crate::geometry::iou;
use crate::samples::EvalSample;
use crate::EvalError;

/// One matched prediction/ground-truth pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchedPair {
    /// Index into the sample's prediction list.
    pub prediction: usize,
    /// Index into the sample's ground-truth list.
    pub ground_truth: usize,
    /// Overlap of the pair.
    pub iou: f64,
}

/// Result of matching one class within one sample.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MatchOutcome {
    /// Matched pairs (true positives), in claim order.
    pub true_positives: Vec<MatchedPair>,
    /// Prediction indices that claimed nothing (false positives).
    pub false_positives: Vec<usize>,
    /// Ground-truth boxes nothing claimed (false negatives).
    pub missed: usize,
}

/// Matches predictions of `class` to ground truth of `class` within one
/// sample. Predictions are taken in confidence-descending order (ties:
/// higher best-IoU against any ground truth of the class first, then input
/// order); each greedily claims the unclaimed ground truth with the
/// highest IoU at or above `iou_threshold` (ties: lowest ground-truth
/// index). No ground truth is claimed twice, so
/// `true_positives.len() + missed` always equals the class's ground-truth
/// count.
pub fn match_detections(
    sample: &EvalSample,
    class: PostureClass,
    iou_threshold: f64,
) -> Result<MatchOutcome, EvalError> {
    if !(iou_threshold > 0.0 && iou_threshold <= 1.0) {
        return Err(EvalError::BadThreshold {
            threshold: iou_threshold,
        });
    }

    let gt_indices: Vec<usize> = (0..sample.ground_truth.len())
        .filter(|&g| sample.ground_truth[g].class == class)
        .collect();
    let mut order: Vec<(usize, f64)> = (0..sample.predictions.len())
        .filter(|&p| sample.predictions[p].class == class)
        .map(|p| {
            let best = gt_indices
                .iter()
                .map(|&g| iou(&sample.predictions[p].bbox, &sample.ground_truth[g].bbox))
                .fold(0.0f64, f64::max);
            (p, best)
        })
        .collect();
    order.sort_by(|(pa, best_a), (pb, best_b)| {
        sample.predictions[*pb]
            .confidence
            .total_cmp(&sample.predictions[*pa].confidence)
            .then(best_b.total_cmp(best_a))
            .then(pa.cmp(pb))
    });

    let mut claimed = vec![false; sample.ground_truth.len()];
    let mut outcome = MatchOutcome::default();
    for (p, _) in order {
        let mut best: Option<(usize, f64)> = None;
        for &g in &gt_indices {
            if claimed[g] {
                continue;
            }
            let overlap = iou(&sample.predictions[p].bbox, &sample.ground_truth[g].bbox);
            if overlap >= iou_threshold && best.is_none_or(|(_, b)| overlap > b) {
                best = Some((g, overlap));
            }
        }
        match best {
            Some((g, overlap)) => {
                claimed[g] = true;
                outcome.true_positives.push(MatchedPair {
                    prediction: p,
                    ground_truth: g,
                    iou: overlap,
                });
            }
            None => outcome.false_positives.push(p),
        }
    }
    outcome.missed = gt_indices.iter().filter(|&&g| !claimed[g]).count();
    Ok(outcome)
}
