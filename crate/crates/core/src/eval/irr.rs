use std::collections::BTreeMap;

use serde::Serialize;

use super::matching::{index_frames, match_instances};
use crate::error::{Error, Result};
use crate::types::{ActionTaxonomy, FrameRecord};

/// Reliability gates agreed before merging two annotators' labels.
pub const KAPPA_GATE: f64 = 0.80;
pub const MEAN_IOU_GATE: f64 = 0.70;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct AgreementCounts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl AgreementCounts {
    pub fn new(tp: usize, fp: usize, fn_: usize) -> Self {
        AgreementCounts { tp, fp, fn_ }
    }

    pub fn precision(&self) -> Option<f64> {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> Option<f64> {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn f1(&self) -> Option<f64> {
        let (p, r) = (self.precision()?, self.recall()?);
        if p + r == 0.0 {
            Some(0.0)
        } else {
            Some(2.0 * p * r / (p + r))
        }
    }

    fn add(&mut self, other: &AgreementCounts) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
    }
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassAgreement {
    pub class: String,
    pub counts: AgreementCounts,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

impl ClassAgreement {
    pub fn from_counts(class: impl Into<String>, counts: AgreementCounts) -> Self {
        ClassAgreement {
            class: class.into(),
            counts,
            precision: counts.precision(),
            recall: counts.recall(),
            f1: counts.f1(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Kappa {
    pub kappa: f64,
    /// Both raters used one identical label throughout, so chance agreement is 1.
    pub degenerate_marginals: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gates {
    pub kappa: bool,
    pub mean_iou: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IrrReport {
    pub overall: ClassAgreement,
    pub classes: Vec<ClassAgreement>,
    pub kappa: Option<Kappa>,
    pub mean_iou: Option<f64>,
    pub matched_pairs: usize,
    pub frames_compared: usize,
    /// Frames present in only one of the two logs; they are not scored.
    pub frames_unpaired: usize,
    pub gates: Gates,
}

/// Cohen's kappa over paired labels.
pub fn cohen_kappa<L: Ord>(pairs: &[(L, L)]) -> Result<Kappa> {
    if pairs.is_empty() {
        return Err(Error::invalid("kappa needs at least one label pair"));
    }
    let n = pairs.len() as f64;
    let mut margin_a: BTreeMap<&L, usize> = BTreeMap::new();
    let mut margin_b: BTreeMap<&L, usize> = BTreeMap::new();
    let mut agree = 0usize;
    for (a, b) in pairs {
        *margin_a.entry(a).or_default() += 1;
        *margin_b.entry(b).or_default() += 1;
        agree += usize::from(a == b);
    }
    let p_o = agree as f64 / n;
    let p_e: f64 = margin_a
        .iter()
        .map(|(label, &ca)| ca as f64 * margin_b.get(label).copied().unwrap_or(0) as f64)
        .sum::<f64>()
        / (n * n);
    if 1.0 - p_e < 1e-12 {
        return Ok(Kappa {
            kappa: 1.0,
            degenerate_marginals: true,
        });
    }
    Ok(Kappa {
        kappa: (p_o - p_e) / (1.0 - p_e),
        degenerate_marginals: false,
    })
}

/// Agreement between two annotators' logs, with rater A as reference.
///
/// Boxes are paired class-agnostically per frame. A pair with equal labels is
/// a true positive for that label; a pair with different labels counts as a
/// false positive for B's label and a false negative for A's label. Unpaired
/// boxes in B are false positives, unpaired boxes in A false negatives.
pub fn irr_report(
    frames_a: &[FrameRecord],
    frames_b: &[FrameRecord],
    taxonomy: &ActionTaxonomy,
    iou_threshold: f64,
) -> Result<IrrReport> {
    let a = index_frames(frames_a);
    let b = index_frames(frames_b);
    let common: Vec<_> = a.keys().filter(|k| b.contains_key(*k)).cloned().collect();
    if common.is_empty() {
        return Err(Error::invalid("the two logs share no frames"));
    }
    let unpaired = a.len() + b.len() - 2 * common.len();

    let class_index = |label: &str| {
        taxonomy
            .index_of(label)
            .ok_or_else(|| Error::validation(format!("label '{label}' is not in the taxonomy")))
    };
    let mut counts = vec![AgreementCounts::default(); taxonomy.len()];
    let mut label_pairs = Vec::new();
    let mut iou_sum = 0.0;

    for key in &common {
        let (da, db) = (&a[key], &b[key]);
        let m = match_instances(da, db, iou_threshold, true);
        for p in &m.pairs {
            let (la, lb) = (&da[p.a].label, &db[p.b].label);
            let (ia, ib) = (class_index(la)?, class_index(lb)?);
            if ia == ib {
                counts[ia].tp += 1;
            } else {
                counts[ib].fp += 1;
                counts[ia].fn_ += 1;
            }
            label_pairs.push((ia, ib));
            iou_sum += p.iou;
        }
        for &j in &m.unmatched_b {
            counts[class_index(&db[j].label)?].fp += 1;
        }
        for &i in &m.unmatched_a {
            counts[class_index(&da[i].label)?].fn_ += 1;
        }
    }

    let mut total = AgreementCounts::default();
    for c in &counts {
        total.add(c);
    }
    let kappa = if label_pairs.is_empty() {
        None
    } else {
        Some(cohen_kappa(&label_pairs)?)
    };
    let mean_iou = (!label_pairs.is_empty()).then(|| iou_sum / label_pairs.len() as f64);

    Ok(IrrReport {
        overall: ClassAgreement::from_counts("Overall", total),
        classes: taxonomy
            .codes()
            .iter()
            .zip(counts)
            .map(|(c, n)| ClassAgreement::from_counts(c.clone(), n))
            .collect(),
        gates: Gates {
            kappa: kappa.is_some_and(|k| k.kappa >= KAPPA_GATE),
            mean_iou: mean_iou.is_some_and(|m| m >= MEAN_IOU_GATE),
        },
        kappa,
        mean_iou,
        matched_pairs: label_pairs.len(),
        frames_compared: common.len(),
        frames_unpaired: unpaired,
    })
}
