//! Average precision and operating-point selection over predictions
//! pooled across frames.
//!
//! Matching stays per-frame (a prediction can only claim ground truth in
//! its own frame); scoring pools every prediction of the class across
//! frames, sorts them once by confidence, and walks that single ranked
//! list. Pooling makes both numbers invariant to the order frames are
//! supplied in.

use wardlens_core::domain::PostureClass;

use crate::matching::match_detections;
use crate::samples::EvalSample;
use crate::EvalError;

/// One pooled prediction of the class: its confidence and whether the
/// per-frame match made it a true positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PooledPrediction {
    /// Model confidence.
    pub confidence: f64,
    /// Whether this prediction claimed a ground truth.
    pub is_true_positive: bool,
}

/// Pooled, ranked predictions of one class plus the class's ground-truth
/// count across all samples.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ClassPool {
    /// Predictions in canonical rank order: confidence descending, ties
    /// broken by patient, then timestamp, then within-frame input index —
    /// a total order, so the rank list is identical however the samples
    /// were ordered.
    pub predictions: Vec<PooledPrediction>,
    /// Ground-truth instances of the class across all samples.
    pub ground_truth: usize,
}

/// Matches every sample at `iou_threshold` and pools the class's
/// predictions into one canonically ranked list.
pub fn pool_matches(
    samples: &[EvalSample],
    class: PostureClass,
    iou_threshold: f64,
) -> Result<ClassPool, EvalError> {
    let mut ranked = Vec::new();
    let mut ground_truth = 0;
    for (sample_index, sample) in samples.iter().enumerate() {
        let outcome = match_detections(sample, class, iou_threshold)?;
        ground_truth += outcome.true_positives.len() + outcome.missed;
        for pair in &outcome.true_positives {
            ranked.push((sample_index, pair.prediction, true));
        }
        for &p in &outcome.false_positives {
            ranked.push((sample_index, p, false));
        }
    }
    ranked.sort_by(|&(sa, pa, _), &(sb, pb, _)| {
        let a = &samples[sa];
        let b = &samples[sb];
        b.predictions[pb]
            .confidence
            .total_cmp(&a.predictions[pa].confidence)
            .then_with(|| a.patient_id.cmp(&b.patient_id))
            .then_with(|| a.timestamp.cmp(&b.timestamp))
            .then(pa.cmp(&pb))
    });
    Ok(ClassPool {
        predictions: ranked
            .into_iter()
            .map(|(s, p, is_tp)| PooledPrediction {
                confidence: samples[s].predictions[p].confidence,
                is_true_positive: is_tp,
            })
            .collect(),
        ground_truth,
    })
}

/// All-points average precision: area under the precision-recall curve
/// with the monotone-decreasing precision envelope applied. `0.0` with no
/// predictions; an error with no ground truth (undefined).
pub fn average_precision(pool: &ClassPool) -> Result<f64, EvalError> {
    if pool.ground_truth == 0 {
        return Err(EvalError::NoGroundTruth);
    }
    if pool.predictions.is_empty() {
        return Ok(0.0);
    }
    let gt = pool.ground_truth as f64;
    let mut tp = 0usize;
    let mut precision = Vec::with_capacity(pool.predictions.len());
    let mut recall = Vec::with_capacity(pool.predictions.len());
    for (seen, p) in pool.predictions.iter().enumerate() {
        tp += usize::from(p.is_true_positive);
        precision.push(tp as f64 / (seen + 1) as f64);
        recall.push(tp as f64 / gt);
    }
    // Envelope: precision at recall r becomes the maximum precision at any
    // recall ≥ r.
    for i in (0..precision.len() - 1).rev() {
        precision[i] = precision[i].max(precision[i + 1]);
    }
    let mut area = recall[0] * precision[0];
    for i in 1..precision.len() {
        area += (recall[i] - recall[i - 1]) * precision[i];
    }
    Ok(area)
}

/// Precision, recall, and F1 at one confidence threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    /// The confidence threshold applied (`None` with no predictions).
    pub threshold: Option<f64>,
    /// Fraction of kept predictions that are true positives.
    pub precision: f64,
    /// Fraction of ground truth found.
    pub recall: f64,
    /// Harmonic mean of the two (`0.0` when both are zero).
    pub f1: f64,
}

/// The operating point maximizing F1 over the pooled confidence sweep,
/// preferring the lower threshold on ties. With no predictions the point
/// is `(0, 0, 0)` by convention; no ground truth is an error.
pub fn operating_point(pool: &ClassPool) -> Result<OperatingPoint, EvalError> {
    if pool.ground_truth == 0 {
        return Err(EvalError::NoGroundTruth);
    }
    let mut best = OperatingPoint {
        threshold: None,
        precision: 0.0,
        recall: 0.0,
        f1: 0.0,
    };
    if pool.predictions.is_empty() {
        return Ok(best);
    }
    let gt = pool.ground_truth as f64;
    let mut tp = 0usize;
    let mut first = true;
    for (seen, p) in pool.predictions.iter().enumerate() {
        tp += usize::from(p.is_true_positive);
        // A threshold keeps every prediction with confidence ≥ it, so
        // candidate cut points are where the ranked confidence strictly
        // drops (and the end of the list).
        let next = pool.predictions.get(seen + 1);
        if next.is_some_and(|n| n.confidence == p.confidence) {
            continue;
        }
        let precision = tp as f64 / (seen + 1) as f64;
        let recall = tp as f64 / gt;
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        // `>=` so that, walking from high to low thresholds, a tie settles
        // on the lower threshold.
        if first || f1 >= best.f1 {
            best = OperatingPoint {
                threshold: Some(p.confidence),
                precision,
                recall,
                f1,
            };
            first = false;
        }
    }
    Ok(best)
}
