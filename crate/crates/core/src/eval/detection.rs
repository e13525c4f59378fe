//! Detector evaluation against ground truth: precision-recall curves,
//! average precision over IoU thresholds and the background-aware
//! confusion matrix.

use std::collections::BTreeMap;

use serde::Serialize;

use super::matching::{index_frames, iou, match_instances};
use crate::error::{Error, Result};
use crate::types::{ActionTaxonomy, Detection, FrameKey, FrameRecord};

pub const BACKGROUND: &str = "background";
pub const DEFAULT_CONF_THRESHOLD: f64 = 0.25;

/// IoU thresholds 0.50, 0.55, ..., 0.95.
pub fn coco_thresholds() -> Vec<f64> {
    (0..10).map(|i| f64::from(50 + 5 * i) / 100.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrPoint {
    pub confidence: f64,
    pub precision: f64,
    pub recall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrCurve {
    pub class: String,
    pub n_ground_truth: usize,
    /// One point per detection, in descending confidence order.
    pub points: Vec<PrPoint>,
    pub ap: f64,
}

impl PrCurve {
    /// Precision and recall over detections with confidence at or above `conf`.
    pub fn operating_point(&self, conf: f64) -> (Option<f64>, Option<f64>) {
        let recall_none = (self.n_ground_truth > 0).then_some(0.0);
        match self.points.iter().rposition(|p| p.confidence >= conf) {
            Some(i) => (Some(self.points[i].precision), (self.n_ground_truth > 0).then_some(self.points[i].recall)),
            None => (None, recall_none),
        }
    }
}

/// All-points interpolated area under the monotone precision envelope.
pub fn average_precision(points: &[PrPoint]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let mut recall = Vec::with_capacity(points.len() + 2);
    let mut precision = Vec::with_capacity(points.len() + 2);
    recall.push(0.0);
    precision.push(0.0);
    for p in points {
        recall.push(p.recall);
        precision.push(p.precision);
    }
    recall.push(1.0);
    precision.push(0.0);
    for i in (0..precision.len() - 1).rev() {
        precision[i] = precision[i].max(precision[i + 1]);
    }
    (1..recall.len())
        .map(|i| (recall[i] - recall[i - 1]) * precision[i])
        .sum()
}

struct Scored<'a> {
    key: &'a FrameKey,
    det: &'a Detection,
    confidence: f64,
}

fn confidence_of(d: &Detection) -> Result<f64> {
    d.confidence
        .ok_or_else(|| Error::validation(format!("prediction '{}' has no confidence", d.label)))
}

/// Precision-recall curve for one class. `None` when the class has neither
/// ground truth nor detections, in which case its AP is undefined.
pub fn pr_curve(
    predictions: &[FrameRecord],
    ground_truth: &[FrameRecord],
    class: &str,
    iou_threshold: f64,
) -> Result<Option<PrCurve>> {
    let pred = index_frames(predictions);
    let gt = index_frames(ground_truth);
    pr_curve_indexed(&pred, &gt, class, iou_threshold)
}

fn pr_curve_indexed(
    pred: &BTreeMap<FrameKey, Vec<Detection>>,
    gt: &BTreeMap<FrameKey, Vec<Detection>>,
    class: &str,
    iou_threshold: f64,
) -> Result<Option<PrCurve>> {
    let mut scored = Vec::new();
    for (key, dets) in pred {
        for d in dets.iter().filter(|d| d.label == class) {
            scored.push(Scored {
                key,
                det: d,
                confidence: confidence_of(d)?,
            });
        }
    }
    let n_gt: usize = gt.values().map(|v| v.iter().filter(|d| d.label == class).count()).sum();
    if n_gt == 0 && scored.is_empty() {
        return Ok(None);
    }
    // stable sort keeps frame/input order among equal confidences
    scored.sort_by(|a, b| b.confidence.total_cmp(&a.confidence));

    let mut taken: BTreeMap<&FrameKey, Vec<bool>> = BTreeMap::new();
    let mut tp = 0usize;
    let mut points = Vec::with_capacity(scored.len());
    for (rank, s) in scored.iter().enumerate() {
        let mut best: Option<(usize, f64)> = None;
        if let Some(truth) = gt.get(s.key) {
            let used = taken.entry(s.key).or_insert_with(|| vec![false; truth.len()]);
            for (j, g) in truth.iter().enumerate() {
                if g.label != class || used[j] {
                    continue;
                }
                let v = iou(&s.det.bbox, &g.bbox);
                if v >= iou_threshold && best.is_none_or(|(_, b)| v > b) {
                    best = Some((j, v));
                }
            }
            if let Some((j, _)) = best {
                used[j] = true;
                tp += 1;
            }
        }
        points.push(PrPoint {
            confidence: s.confidence,
            precision: tp as f64 / (rank + 1) as f64,
            recall: if n_gt > 0 { tp as f64 / n_gt as f64 } else { 0.0 },
        });
    }
    let ap = if n_gt == 0 { 0.0 } else { average_precision(&points) };
    Ok(Some(PrCurve {
        class: class.to_string(),
        n_ground_truth: n_gt,
        points,
        ap,
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassMap {
    pub class: String,
    /// AP per threshold, `None` when undefined for this class.
    pub per_threshold: Option<Vec<f64>>,
    pub mean: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MapReport {
    pub thresholds: Vec<f64>,
    pub classes: Vec<ClassMap>,
    /// Macro mean over classes with a defined AP.
    pub mean: Option<f64>,
}

/// AP averaged over `thresholds` per class, then over classes.
pub fn map_range(
    predictions: &[FrameRecord],
    ground_truth: &[FrameRecord],
    taxonomy: &ActionTaxonomy,
    thresholds: &[f64],
) -> Result<MapReport> {
    if thresholds.is_empty() {
        return Err(Error::invalid("at least one IoU threshold is required"));
    }
    let pred = index_frames(predictions);
    let gt = index_frames(ground_truth);
    let mut classes = Vec::new();
    for class in taxonomy.codes() {
        let mut aps = Vec::with_capacity(thresholds.len());
        let mut defined = true;
        for &thr in thresholds {
            match pr_curve_indexed(&pred, &gt, class, thr)? {
                Some(c) => aps.push(c.ap),
                None => {
                    defined = false;
                    break;
                }
            }
        }
        let (per_threshold, mean) = if defined {
            let m = aps.iter().sum::<f64>() / aps.len() as f64;
            (Some(aps), Some(m))
        } else {
            (None, None)
        };
        classes.push(ClassMap {
            class: class.clone(),
            per_threshold,
            mean,
        });
    }
    let defined: Vec<f64> = classes.iter().filter_map(|c| c.mean).collect();
    let mean = (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64);
    Ok(MapReport {
        thresholds: thresholds.to_vec(),
        classes,
        mean,
    })
}

/// Rows are predicted classes then background; columns are true classes then background.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    pub cells: Vec<Vec<f64>>,
    pub normalized: bool,
}

impl ConfusionMatrix {
    pub fn column_sum(&self, col: usize) -> f64 {
        self.cells.iter().map(|r| r[col]).sum()
    }
}

pub fn confusion_matrix(
    predictions: &[FrameRecord],
    ground_truth: &[FrameRecord],
    taxonomy: &ActionTaxonomy,
    conf_threshold: f64,
    iou_threshold: f64,
    normalize: bool,
) -> Result<ConfusionMatrix> {
    let k = taxonomy.len();
    let mut cells = vec![vec![0.0; k + 1]; k + 1];
    let index = |label: &str| {
        taxonomy
            .index_of(label)
            .ok_or_else(|| Error::validation(format!("label '{label}' is not in the taxonomy")))
    };
    let pred = index_frames(predictions);
    let gt = index_frames(ground_truth);
    let mut keys: Vec<&FrameKey> = pred.keys().chain(gt.keys()).collect();
    keys.sort();
    keys.dedup();

    let empty = Vec::new();
    for key in keys {
        let truth = gt.get(key).unwrap_or(&empty);
        let mut kept = Vec::new();
        for d in pred.get(key).unwrap_or(&empty) {
            if confidence_of(d)? >= conf_threshold {
                kept.push(d.clone());
            }
        }
        let m = match_instances(truth, &kept, iou_threshold, true);
        for p in &m.pairs {
            cells[index(&kept[p.b].label)?][index(&truth[p.a].label)?] += 1.0;
        }
        for &i in &m.unmatched_a {
            cells[k][index(&truth[i].label)?] += 1.0;
        }
        for &j in &m.unmatched_b {
            cells[index(&kept[j].label)?][k] += 1.0;
        }
    }
    if normalize {
        for col in 0..=k {
            let s: f64 = cells.iter().map(|r| r[col]).sum();
            if s > 0.0 {
                for row in cells.iter_mut() {
                    row[col] /= s;
                }
            }
        }
    }
    let mut labels = taxonomy.codes().to_vec();
    labels.push(BACKGROUND.to_string());
    Ok(ConfusionMatrix {
        labels,
        cells,
        normalized: normalize,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassDetection {
    pub class: String,
    pub n_ground_truth: usize,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub ap50: Option<f64>,
    pub ap50_95: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetEvalReport {
    pub conf_threshold: f64,
    pub classes: Vec<ClassDetection>,
    pub mean_precision: Option<f64>,
    pub mean_recall: Option<f64>,
    pub map50: Option<f64>,
    pub map50_95: Option<f64>,
    pub curves: Vec<PrCurve>,
    pub confusion: ConfusionMatrix,
}

fn mean_of(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = values.flatten().collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Full detector report. Precision and recall are read at `conf_threshold`
/// and IoU 0.5.
pub fn evaluate_detector(
    predictions: &[FrameRecord],
    ground_truth: &[FrameRecord],
    taxonomy: &ActionTaxonomy,
    conf_threshold: f64,
) -> Result<DetEvalReport> {
    let pred = index_frames(predictions);
    let gt = index_frames(ground_truth);
    let range = map_range(predictions, ground_truth, taxonomy, &coco_thresholds())?;
    let mut classes = Vec::new();
    let mut curves = Vec::new();
    for (class, map) in taxonomy.codes().iter().zip(&range.classes) {
        let curve = pr_curve_indexed(&pred, &gt, class, 0.5)?;
        let (precision, recall) = curve
            .as_ref()
            .map(|c| c.operating_point(conf_threshold))
            .unwrap_or((None, None));
        classes.push(ClassDetection {
            class: class.clone(),
            n_ground_truth: curve.as_ref().map_or(0, |c| c.n_ground_truth),
            precision,
            recall,
            ap50: curve.as_ref().map(|c| c.ap),
            ap50_95: map.mean,
        });
        curves.extend(curve);
    }
    Ok(DetEvalReport {
        conf_threshold,
        mean_precision: mean_of(classes.iter().map(|c| c.precision)),
        mean_recall: mean_of(classes.iter().map(|c| c.recall)),
        map50: mean_of(classes.iter().map(|c| c.ap50)),
        map50_95: range.mean,
        classes,
        curves,
        confusion: confusion_matrix(predictions, ground_truth, taxonomy, conf_threshold, 0.5, true)?,
    })
}
