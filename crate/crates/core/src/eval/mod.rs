//! Instance matching, annotator agreement and detector evaluation.

mod detection;
mod irr;
mod matching;

pub use detection::{
    average_precision, coco_thresholds, confusion_matrix, evaluate_detector, map_range, pr_curve, ClassDetection,
    ClassMap, ConfusionMatrix, DetEvalReport, MapReport, PrCurve, PrPoint, BACKGROUND, DEFAULT_CONF_THRESHOLD,
};
pub use irr::{
    cohen_kappa, irr_report, AgreementCounts, ClassAgreement, Gates, IrrReport, Kappa, KAPPA_GATE, MEAN_IOU_GATE,
};
pub use matching::{iou, match_instances, MatchResult, MatchedPair};
