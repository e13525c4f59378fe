//! Frame-sampling plan and privacy-mask geometry.

use crate::error::{Error, Result};
use crate::types::{BoundingBox, Session};

/// Timestamps `handover, handover + interval, ...` strictly before the end of
/// the session.
pub fn plan_frame_samples(session: &Session, interval_s: f64) -> Result<Vec<f64>> {
    session.validate()?;
    if !(interval_s.is_finite() && interval_s > 0.0) {
        return Err(Error::invalid(format!("sampling interval must be positive, got {interval_s}")));
    }
    // Multiplying instead of accumulating keeps every timestamp exact to one rounding.
    let mut out = Vec::new();
    let mut k = 0u64;
    loop {
        let t = session.handover_s + k as f64 * interval_s;
        if t >= session.duration_s {
            break;
        }
        out.push(t);
        k += 1;
    }
    Ok(out)
}

/// Upper `fraction` of each box (smaller `y` is higher in the image).
pub fn mask_regions(boxes: &[BoundingBox], fraction: f64) -> Result<Vec<BoundingBox>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::invalid(format!("mask fraction must lie in (0,1], got {fraction}")));
    }
    boxes
        .iter()
        .map(|b| {
            if fraction == 1.0 {
                return Ok(*b);
            }
            let y2 = (b.y1() + fraction * b.height()).min(b.y2());
            BoundingBox::new(b.x1(), b.y1(), b.x2(), y2)
        })
        .collect()
}
