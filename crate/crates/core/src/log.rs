//! Newline-delimited detection logs.
//!
//! Each non-blank line is one JSON object:
//!
//! ```text
//! {"session_id": "s01", "t": 12.0, "source": "model",
//!  "detections": [{"label": "Using Phone", "confidence": 0.91, "box": [10, 20, 40, 80]}]}
//! ```
//!
//! Parsing is done in two steps so that invariant violations can be
//! reported with the offending field and line number.

use std::collections::HashSet;
use std::io::{BufRead, Write};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::types::{ActionTaxonomy, BoundingBox, Detection, FrameRecord};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFrame {
    session_id: String,
    t: f64,
    source: String,
    #[serde(default)]
    detections: Vec<RawDetection>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDetection {
    label: String,
    #[serde(default)]
    confidence: Option<f64>,
    #[serde(rename = "box")]
    bbox: Vec<f64>,
}

fn invalid(line: usize, message: String) -> Error {
    Error::Validation {
        line: Some(line),
        message,
    }
}

/// Reads a detection log, validating every record against the taxonomy.
pub fn parse_detection_log<R: BufRead>(reader: R, taxonomy: &ActionTaxonomy) -> Result<Vec<FrameRecord>> {
    let mut frames = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawFrame = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        let frame = validate_frame(raw, taxonomy, lineno)?;
        if !seen.insert((frame.session_id.clone(), frame.t.to_bits(), frame.source.clone())) {
            return Err(invalid(
                lineno,
                format!(
                    "duplicate record for session '{}', t={}, source '{}'",
                    frame.session_id, frame.t, frame.source
                ),
            ));
        }
        frames.push(frame);
    }
    Ok(frames)
}

fn validate_frame(raw: RawFrame, taxonomy: &ActionTaxonomy, line: usize) -> Result<FrameRecord> {
    if !raw.t.is_finite() || raw.t < 0.0 {
        return Err(invalid(line, format!("field 't' must be finite and >= 0, got {}", raw.t)));
    }
    let mut detections = Vec::with_capacity(raw.detections.len());
    for (k, d) in raw.detections.into_iter().enumerate() {
        if !taxonomy.contains(&d.label) {
            return Err(invalid(
                line,
                format!("detections[{k}].label: unknown taxonomy code '{}'", d.label),
            ));
        }
        if let Some(c) = d.confidence {
            if !(0.0..=1.0).contains(&c) {
                return Err(invalid(
                    line,
                    format!("detections[{k}].confidence must lie in [0,1], got {c}"),
                ));
            }
        }
        if d.bbox.len() != 4 {
            return Err(invalid(
                line,
                format!("detections[{k}].box must have 4 coordinates, got {}", d.bbox.len()),
            ));
        }
        let bbox = BoundingBox::new(d.bbox[0], d.bbox[1], d.bbox[2], d.bbox[3]).map_err(|e| {
            let msg = match e {
                Error::Validation { message, .. } => message,
                other => other.to_string(),
            };
            invalid(line, format!("detections[{k}].box: {msg}"))
        })?;
        detections.push(Detection {
            label: d.label,
            confidence: d.confidence,
            bbox,
        });
    }
    Ok(FrameRecord {
        session_id: raw.session_id,
        t: raw.t,
        source: raw.source,
        detections,
    })
}

/// Writes frames in the same line format accepted by [`parse_detection_log`].
pub fn write_detection_log<W: Write>(mut out: W, frames: &[FrameRecord]) -> std::io::Result<()> {
    for f in frames {
        serde_json::to_writer(&mut out, f)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
