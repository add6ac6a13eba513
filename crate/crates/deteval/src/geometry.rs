//! Box-overlap measures: plain intersection-over-union and the complete
//! IoU used as a diagnostic.

use std::f64::consts::PI;

use wardlens_core::domain::BoundingBox;

use crate::EvalError;

/// Intersection over union of two boxes: intersection area / union area,
/// `0.0` when disjoint, `1.0` when identical. Symmetric.
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let iw = (a.x_max().min(b.x_max()) - a.x_min().max(b.x_min())).max(0.0);
    let ih = (a.y_max().min(b.y_max()) - a.y_min().max(b.y_min())).max(0.0);
    let intersection = iw * ih;
    let union = a.area() + b.area() - intersection;
    intersection / union
}

/// Complete IoU: `IoU − ρ²/c² − αv`, where ρ is the distance between box
/// centers, c the diagonal of the smallest enclosing box,
/// `v = (4/π²)(atan(w_g/h_g) − atan(w/h))²` the aspect-ratio term, and
/// `α = v/((1−IoU)+v)`. Equals IoU exactly for concentric boxes of equal
/// aspect ratio, `1.0` for identical boxes, and never exceeds [`iou`].
///
/// Zero-area boxes are rejected; the validated box constructor already
/// forbids them, so the guard only matters if that invariant is ever
/// relaxed.
pub fn ciou(pred: &BoundingBox, gt: &BoundingBox) -> Result<f64, EvalError> {
    if pred.area() <= 0.0 || gt.area() <= 0.0 {
        return Err(EvalError::DegenerateBox);
    }
    let overlap = iou(pred, gt);

    let (pcx, pcy) = pred.center();
    let (gcx, gcy) = gt.center();
    let rho2 = (pcx - gcx) * (pcx - gcx) + (pcy - gcy) * (pcy - gcy);

    let ew = pred.x_max().max(gt.x_max()) - pred.x_min().min(gt.x_min());
    let eh = pred.y_max().max(gt.y_max()) - pred.y_min().min(gt.y_min());
    let c2 = ew * ew + eh * eh;

    let delta = (gt.width() / gt.height()).atan() - (pred.width() / pred.height()).atan();
    let v = 4.0 / (PI * PI) * delta * delta;
    // α = v/((1−IoU)+v) is 0/0 for identical boxes; the aspect penalty αv
    // is zero whenever v is, so short-circuit instead of dividing.
    let aspect_penalty = if v == 0.0 {
        0.0
    } else {
        v / ((1.0 - overlap) + v) * v
    };

    Ok(overlap - rho2 / c2 - aspect_penalty)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use wardlens_core::domain::FrameGeometry;

    fn bbox(x0: f64, y0: f64, x1: f64, y1: f64) -> BoundingBox {
        BoundingBox::new(x0, y0, x1, y1, &FrameGeometry::default()).unwrap()
    }

    fn random_box(rng: &mut StdRng) -> BoundingBox {
        let x0 = rng.gen_range(0.0..600.0);
        let y0 = rng.gen_range(0.0..530.0);
        let w = rng.gen_range(1.0..(640.0 - x0));
        let h = rng.gen_range(1.0..(576.0 - y0));
        bbox(x0, y0, x0 + w, y0 + h)
    }

    #[test]
    fn identical_boxes_have_iou_one() {
        let a = bbox(10.0, 20.0, 110.0, 170.0);
        assert_eq!(iou(&a, &a), 1.0);
    }

    #[test]
    fn unit_overlap_example() {
        // Areas 4 and 4, intersection 1, union 7.
        let a = bbox(0.0, 0.0, 2.0, 2.0);
        let b = bbox(1.0, 1.0, 3.0, 3.0);
        assert_eq!(iou(&a, &b), 1.0 / 7.0);
    }

    #[test]
    fn disjoint_boxes_have_iou_zero() {
        let a = bbox(0.0, 0.0, 2.0, 2.0);
        let b = bbox(5.0, 5.0, 7.0, 7.0);
        assert_eq!(iou(&a, &b), 0.0);
        // Sharing only an edge is still zero overlap.
        let c = bbox(2.0, 0.0, 4.0, 2.0);
        assert_eq!(iou(&a, &c), 0.0);
    }

    #[test]
    fn iou_is_symmetric() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..200 {
            let a = random_box(&mut rng);
            let b = random_box(&mut rng);
            assert_eq!(iou(&a, &b), iou(&b, &a));
        }
    }

    #[test]
    fn ciou_of_identical_boxes_is_one() {
        let a = bbox(10.0, 20.0, 110.0, 170.0);
        assert_eq!(ciou(&a, &a).unwrap(), 1.0);
    }

    #[test]
    fn concentric_equal_aspect_boxes_reduce_to_iou() {
        // Both 2:1 aspect, both centered on (200, 150): ρ = 0 and v = 0,
        // so the penalties vanish identically.
        let outer = bbox(100.0, 100.0, 300.0, 200.0);
        let inner = bbox(150.0, 125.0, 250.0, 175.0);
        assert_eq!(ciou(&inner, &outer).unwrap(), iou(&inner, &outer));
    }

    #[test]
    fn hand_checked_ciou_value() {
        // pred 2x4 at origin vs gt 3x2 at (1,1): IoU = 1/6, ρ²/c² = 2.25/32
        // exactly, v and α from the atan term; value frozen from an
        // independent double-precision evaluation of the same formula.
        let pred = bbox(0.0, 0.0, 2.0, 4.0);
        let gt = bbox(1.0, 1.0, 4.0, 3.0);
        let value = ciou(&pred, &gt).unwrap();
        assert!((value - 0.083_696_062_420_999_63).abs() < 1e-12, "got {value}");
    }

    #[test]
    fn ciou_never_exceeds_iou() {
        let mut rng = StdRng::seed_from_u64(12);
        for _ in 0..500 {
            let a = random_box(&mut rng);
            let b = random_box(&mut rng);
            let c = ciou(&a, &b).unwrap();
            assert!(c <= iou(&a, &b) + 1e-15, "ciou {c} > iou {}", iou(&a, &b));
            assert!(c <= 1.0);
        }
    }
}
