//! High/low performance grouping from teacher rubrics.

use crate::types::{Dimension, Level, PerformanceGroup, RubricAssessment};

/// Means at or above this value are High. Sits halfway between the integer
/// bands 1-3 (low) and 4-7 (high).
pub const HIGH_THRESHOLD: f64 = 3.5;

pub fn performance_group(assessment: &RubricAssessment, dimension: Dimension) -> PerformanceGroup {
    let items = assessment.items();
    let slice = match dimension {
        Dimension::Task => &items[0..3],
        Dimension::Collaboration => &items[3..6],
    };
    let mean = slice.iter().map(|&v| f64::from(v)).sum::<f64>() / 3.0;
    PerformanceGroup {
        dimension,
        level: if mean >= HIGH_THRESHOLD { Level::High } else { Level::Low },
        mean,
        boundary: mean > 3.0 && mean < 4.0,
    }
}
