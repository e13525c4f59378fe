use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::Serialize;

use crate::types::{BoundingBox, Detection, FrameKey, FrameRecord};

/// Intersection over union of two boxes; 0 for disjoint boxes.
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let w = (a.x2().min(b.x2()) - a.x1().max(b.x1())).max(0.0);
    let h = (a.y2().min(b.y2()) - a.y1().max(b.y1())).max(0.0);
    let inter = w * h;
    if inter <= 0.0 {
        return 0.0;
    }
    let union = a.area() + b.area() - inter;
    (inter / union).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatchedPair {
    pub a: usize,
    pub b: usize,
    pub iou: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct MatchResult {
    /// Pairs in the order they were accepted (descending IoU).
    pub pairs: Vec<MatchedPair>,
    pub unmatched_a: Vec<usize>,
    pub unmatched_b: Vec<usize>,
}

/// Greedy one-to-one matching in descending IoU order.
///
/// Only pairs with IoU at or above `iou_threshold` are candidates; equal IoUs
/// are resolved by the lower index in `set_a`, then in `set_b`. With
/// `class_agnostic == false` only equally labelled pairs are candidates.
pub fn match_instances(
    set_a: &[Detection],
    set_b: &[Detection],
    iou_threshold: f64,
    class_agnostic: bool,
) -> MatchResult {
    let mut candidates = Vec::new();
    for (i, da) in set_a.iter().enumerate() {
        for (j, db) in set_b.iter().enumerate() {
            if !class_agnostic && da.label != db.label {
                continue;
            }
            let v = iou(&da.bbox, &db.bbox);
            if v >= iou_threshold {
                candidates.push(MatchedPair { a: i, b: j, iou: v });
            }
        }
    }
    candidates.sort_by(|x, y| {
        y.iou
            .partial_cmp(&x.iou)
            .unwrap_or(Ordering::Equal)
            .then(x.a.cmp(&y.a))
            .then(x.b.cmp(&y.b))
    });

    let mut used_a = vec![false; set_a.len()];
    let mut used_b = vec![false; set_b.len()];
    let mut pairs = Vec::new();
    for c in candidates {
        if !used_a[c.a] && !used_b[c.b] {
            used_a[c.a] = true;
            used_b[c.b] = true;
            pairs.push(c);
        }
    }
    MatchResult {
        pairs,
        unmatched_a: (0..set_a.len()).filter(|&i| !used_a[i]).collect(),
        unmatched_b: (0..set_b.len()).filter(|&j| !used_b[j]).collect(),
    }
}

/// Detections grouped per video frame, ignoring the record source.
/// Records sharing a frame key are concatenated in input order.
pub(crate) fn index_frames(frames: &[FrameRecord]) -> BTreeMap<FrameKey, Vec<Detection>> {
    let mut map: BTreeMap<FrameKey, Vec<Detection>> = BTreeMap::new();
    for f in frames {
        map.entry(f.frame_key()).or_default().extend(f.detections.iter().cloned());
    }
    map
}
