use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairedT {
    pub t: f64,
    pub df: f64,
    pub p: f64,
}

/// Two-sided paired t-test on `x - y`.
pub fn paired_t(x: &[f64], y: &[f64]) -> Result<PairedT> {
    if x.len() != y.len() {
        return Err(Error::Shape(format!("paired samples differ in length: {} vs {}", x.len(), y.len())));
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::invalid("paired t-test needs at least two pairs"));
    }
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let nf = n as f64;
    let mean = d.iter().sum::<f64>() / nf;
    let var = d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    if var == 0.0 {
        return Err(Error::degenerate("zero-variance differences"));
    }
    let t = mean / (var.sqrt() / nf.sqrt());
    let df = nf - 1.0;
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::invalid(e.to_string()))?;
    let p = (2.0 * dist.sf(t.abs())).min(1.0);
    Ok(PairedT { t, df, p })
}
