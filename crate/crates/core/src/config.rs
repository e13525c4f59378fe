//! Study configuration document.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::performance_group;
use crate::spatial::{DistractionPolicy, SpatialCodeSet};
use crate::types::{ActionTaxonomy, Dimension, PerformanceGroup, RubricAssessment, Session, SpaceMap};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    pub iou: f64,
    pub mask_fraction: f64,
    pub imbalance_limit: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            iou: 0.5,
            mask_fraction: 0.20,
            imbalance_limit: 5.0,
        }
    }
}

/// Optional overrides for spatial coding.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SpatialOptions {
    pub distraction: DistractionPolicy,
    /// Explicit spatial code list; the built-in set is used when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub codes: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct StudyConfig {
    #[serde(default)]
    pub taxonomy: ActionTaxonomy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spaces: Option<SpaceMap>,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub sessions: Vec<Session>,
    #[serde(default)]
    pub rubrics: Vec<RubricAssessment>,
    #[serde(default)]
    pub spatial: SpatialOptions,
}

impl StudyConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: StudyConfig = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for s in &self.sessions {
            s.validate()?;
        }
        for r in &self.rubrics {
            r.validate()?;
        }
        let t = &self.thresholds;
        if !(0.0..=1.0).contains(&t.iou) {
            return Err(Error::validation(format!("thresholds.iou {} outside [0,1]", t.iou)));
        }
        if !(t.mask_fraction > 0.0 && t.mask_fraction <= 1.0) {
            return Err(Error::validation(format!(
                "thresholds.mask_fraction {} outside (0,1]",
                t.mask_fraction
            )));
        }
        if t.imbalance_limit.is_nan() || t.imbalance_limit < 1.0 {
            return Err(Error::validation("thresholds.imbalance_limit must be >= 1"));
        }
        self.spatial_codes()?;
        Ok(())
    }

    pub fn space_map(&self) -> Result<&SpaceMap> {
        self.spaces
            .as_ref()
            .ok_or_else(|| Error::validation("configuration defines no spaces"))
    }

    pub fn spatial_codes(&self) -> Result<SpatialCodeSet> {
        match &self.spatial.codes {
            Some(codes) => SpatialCodeSet::new(codes.clone()),
            None => Ok(SpatialCodeSet::for_policy(self.spatial.distraction)),
        }
    }

    /// Performance group of every rubric, keyed by session id.
    pub fn groups(&self, dimension: Dimension) -> BTreeMap<String, PerformanceGroup> {
        self.rubrics
            .iter()
            .map(|r| (r.session_id.clone(), performance_group(r, dimension)))
            .collect()
    }
}
