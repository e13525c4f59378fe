use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdjustMethod {
    #[default]
    Holm,
    Bonferroni,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdjustedPValues {
    pub method: AdjustMethod,
    pub raw: Vec<f64>,
    /// Same order as `raw`.
    pub adjusted: Vec<f64>,
}

fn check(raw: &[f64]) -> Result<()> {
    if let Some(p) = raw.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
        return Err(Error::invalid(format!("p-values must lie in (0,1], got {p}")));
    }
    Ok(())
}

/// Holm step-down adjustment.
pub fn holm_adjust(raw: &[f64]) -> Result<AdjustedPValues> {
    adjust(raw, AdjustMethod::Holm)
}

pub fn adjust(raw: &[f64], method: AdjustMethod) -> Result<AdjustedPValues> {
    check(raw)?;
    let m = raw.len();
    let adjusted = match method {
        AdjustMethod::Bonferroni => raw.iter().map(|p| (p * m as f64).min(1.0)).collect(),
        AdjustMethod::Holm => {
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&a, &b| raw[a].total_cmp(&raw[b]));
            let mut out = vec![0.0; m];
            let mut running = 0.0f64;
            for (rank, &i) in order.iter().enumerate() {
                running = running.max(((m - rank) as f64 * raw[i]).min(1.0));
                out[i] = running;
            }
            out
        }
    };
    Ok(AdjustedPValues {
        method,
        raw: raw.to_vec(),
        adjusted,
    })
}
