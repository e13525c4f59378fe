//! Domain types shared by every analysis stage.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Code that is dropped from all behaviour timelines.
pub const FILTERED_CODE: &str = "Sitting";

/// Axis-aligned box in pixel coordinates. `y` grows downward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct BoundingBox {
    x1: f64,
    y1: f64,
    x2: f64,
    y2: f64,
}

impl BoundingBox {
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Result<Self> {
        let coords = [x1, y1, x2, y2];
        if coords.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::validation(format!(
                "box coordinates must be finite and non-negative, got {coords:?}"
            )));
        }
        if x2 <= x1 || y2 <= y1 {
            return Err(Error::validation(format!(
                "box must satisfy x2 > x1 and y2 > y1, got {coords:?}"
            )));
        }
        Ok(BoundingBox { x1, y1, x2, y2 })
    }

    pub fn x1(&self) -> f64 {
        self.x1
    }
    pub fn y1(&self) -> f64 {
        self.y1
    }
    pub fn x2(&self) -> f64 {
        self.x2
    }
    pub fn y2(&self) -> f64 {
        self.y2
    }

    pub fn width(&self) -> f64 {
        self.x2 - self.x1
    }

    pub fn height(&self) -> f64 {
        self.y2 - self.y1
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn midpoint(&self) -> (f64, f64) {
        ((self.x1 + self.x2) / 2.0, (self.y1 + self.y2) / 2.0)
    }

    pub fn contains(&self, other: &BoundingBox) -> bool {
        other.x1 >= self.x1 && other.y1 >= self.y1 && other.x2 <= self.x2 && other.y2 <= self.y2
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.x1, self.y1, self.x2, self.y2]
    }
}

impl TryFrom<[f64; 4]> for BoundingBox {
    type Error = Error;

    fn try_from(c: [f64; 4]) -> Result<Self> {
        BoundingBox::new(c[0], c[1], c[2], c[3])
    }
}

impl From<BoundingBox> for [f64; 4] {
    fn from(b: BoundingBox) -> Self {
        b.to_array()
    }
}

/// One labelled box. Human annotations carry no confidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
    #[serde(rename = "box")]
    pub bbox: BoundingBox,
}

impl Detection {
    pub fn new(label: impl Into<String>, confidence: Option<f64>, bbox: BoundingBox) -> Result<Self> {
        if let Some(c) = confidence {
            if !(0.0..=1.0).contains(&c) {
                return Err(Error::validation(format!(
                    "confidence must lie in [0,1], got {c}"
                )));
            }
        }
        Ok(Detection {
            label: label.into(),
            confidence,
            bbox,
        })
    }
}

/// All detections one source produced for one video frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub session_id: String,
    pub t: f64,
    pub source: String,
    pub detections: Vec<Detection>,
}

impl FrameRecord {
    /// Key identifying the video frame independently of who labelled it.
    pub fn frame_key(&self) -> FrameKey {
        FrameKey {
            session_id: self.session_id.clone(),
            t_bits: self.t.to_bits(),
        }
    }
}

/// `(session_id, t)` with `t` compared bitwise so it can live in ordered maps.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FrameKey {
    pub session_id: String,
    t_bits: u64,
}

impl FrameKey {
    pub fn t(&self) -> f64 {
        f64::from_bits(self.t_bits)
    }
}

/// Ordered list of action codes. Order fixes the binary coding positions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct ActionTaxonomy {
    codes: Vec<String>,
}

impl ActionTaxonomy {
    pub fn new(codes: Vec<String>) -> Result<Self> {
        if codes.is_empty() {
            return Err(Error::validation("taxonomy must not be empty"));
        }
        for (i, c) in codes.iter().enumerate() {
            if codes[..i].contains(c) {
                return Err(Error::validation(format!("duplicate taxonomy code '{c}'")));
            }
        }
        Ok(ActionTaxonomy { codes })
    }

    pub fn codes(&self) -> &[String] {
        &self.codes
    }

    pub fn index_of(&self, code: &str) -> Option<usize> {
        self.codes.iter().position(|c| c == code)
    }

    pub fn contains(&self, code: &str) -> bool {
        self.index_of(code).is_some()
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    /// Binary vector over the taxonomy for a set of observed labels.
    pub fn encode<'a>(&self, labels: impl IntoIterator<Item = &'a str>) -> Vec<u8> {
        let mut v = vec![0u8; self.codes.len()];
        for l in labels {
            if let Some(i) = self.index_of(l) {
                v[i] = 1;
            }
        }
        v
    }
}

impl Default for ActionTaxonomy {
    fn default() -> Self {
        let codes = [
            "Using Computer",
            "Doc/Note Interaction",
            "Using Phone",
            "Medi/Equip Interaction",
            "Sitting",
            "Patient Interaction",
            "Other",
        ];
        ActionTaxonomy {
            codes: codes.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl TryFrom<Vec<String>> for ActionTaxonomy {
    type Error = Error;
    fn try_from(v: Vec<String>) -> Result<Self> {
        ActionTaxonomy::new(v)
    }
}

impl From<ActionTaxonomy> for Vec<String> {
    fn from(t: ActionTaxonomy) -> Self {
        t.codes
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub session_id: String,
    #[serde(default)]
    pub scenario: String,
    pub duration_s: f64,
    #[serde(default)]
    pub handover_s: f64,
}

impl Session {
    pub fn validate(&self) -> Result<()> {
        if !(self.duration_s.is_finite() && self.duration_s > 0.0) {
            return Err(Error::validation(format!(
                "session '{}': duration_s must be positive",
                self.session_id
            )));
        }
        if !(self.handover_s.is_finite() && self.handover_s >= 0.0) {
            return Err(Error::validation(format!(
                "session '{}': handover_s must be non-negative",
                self.session_id
            )));
        }
        if self.handover_s >= self.duration_s {
            return Err(Error::validation(format!(
                "session '{}': handover_s ({}) must precede duration_s ({})",
                self.session_id, self.handover_s, self.duration_s
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Zone {
    Primary,
    Secondary,
    Distraction,
    Transition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceCentroid {
    pub name: String,
    pub x: f64,
    pub y: f64,
    pub zone: Zone,
}

/// Named centroids of the spaces of interest in camera coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<SpaceCentroid>", into = "Vec<SpaceCentroid>")]
pub struct SpaceMap {
    centroids: Vec<SpaceCentroid>,
}

impl SpaceMap {
    pub fn new(centroids: Vec<SpaceCentroid>) -> Result<Self> {
        if centroids.is_empty() {
            return Err(Error::validation("space map must contain at least one centroid"));
        }
        if !centroids.iter().any(|c| c.zone == Zone::Primary) {
            return Err(Error::validation(
                "space map must contain at least one primary-zone centroid",
            ));
        }
        for (i, c) in centroids.iter().enumerate() {
            if !(c.x.is_finite() && c.y.is_finite()) {
                return Err(Error::validation(format!(
                    "centroid '{}' has non-finite coordinates",
                    c.name
                )));
            }
            if centroids[..i].iter().any(|o| o.name == c.name) {
                return Err(Error::validation(format!(
                    "duplicate centroid name '{}'",
                    c.name
                )));
            }
        }
        Ok(SpaceMap { centroids })
    }

    pub fn centroids(&self) -> &[SpaceCentroid] {
        &self.centroids
    }
}

impl TryFrom<Vec<SpaceCentroid>> for SpaceMap {
    type Error = Error;
    fn try_from(v: Vec<SpaceCentroid>) -> Result<Self> {
        SpaceMap::new(v)
    }
}

impl From<SpaceMap> for Vec<SpaceCentroid> {
    fn from(m: SpaceMap) -> Self {
        m.centroids
    }
}

/// Six-item teacher rubric, each item on a 1..=7 scale.
/// Items 1-3 rate task performance, items 4-6 collaboration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RubricAssessment {
    pub session_id: String,
    #[serde(rename = "T1")]
    pub t1: u8,
    #[serde(rename = "T2")]
    pub t2: u8,
    #[serde(rename = "T3")]
    pub t3: u8,
    #[serde(rename = "T4")]
    pub t4: u8,
    #[serde(rename = "T5")]
    pub t5: u8,
    #[serde(rename = "T6")]
    pub t6: u8,
}

impl RubricAssessment {
    pub fn new(session_id: impl Into<String>, items: [u8; 6]) -> Result<Self> {
        let r = RubricAssessment {
            session_id: session_id.into(),
            t1: items[0],
            t2: items[1],
            t3: items[2],
            t4: items[3],
            t5: items[4],
            t6: items[5],
        };
        r.validate()?;
        Ok(r)
    }

    pub fn items(&self) -> [u8; 6] {
        [self.t1, self.t2, self.t3, self.t4, self.t5, self.t6]
    }

    pub fn validate(&self) -> Result<()> {
        for (i, v) in self.items().iter().enumerate() {
            if !(1..=7).contains(v) {
                return Err(Error::validation(format!(
                    "rubric '{}': T{} = {v} outside 1..=7",
                    self.session_id,
                    i + 1
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    Task,
    Collaboration,
}

impl std::str::FromStr for Dimension {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "task" => Ok(Dimension::Task),
            "collaboration" => Ok(Dimension::Collaboration),
            other => Err(Error::invalid(format!(
                "unknown dimension '{other}' (expected task or collaboration)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Level {
    High,
    Low,
}

impl Level {
    pub fn is_high(self) -> bool {
        self == Level::High
    }

    pub fn swapped(self) -> Level {
        match self {
            Level::High => Level::Low,
            Level::Low => Level::High,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerformanceGroup {
    pub dimension: Dimension,
    pub level: Level,
    /// Mean of the dimension's three rubric items.
    pub mean: f64,
    /// Set when the mean falls strictly between the integer bands 1-3 and 4-7.
    pub boundary: bool,
}
