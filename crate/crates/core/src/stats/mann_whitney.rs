use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use super::rank::{median, midranks, tie_groups};
use crate::error::{Error, Result};

/// Samples up to this combined size without ties use the exact null distribution.
pub const EXACT_MAX_N: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PMethod {
    Exact,
    NormalApprox,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MannWhitneyResult {
    /// U statistic of the first sample: pairs where it exceeds the second, ties count half.
    pub u: f64,
    pub n1: usize,
    pub n2: usize,
    /// Two-sided p-value.
    pub p: f64,
    /// Rank-biserial correlation, `1 - 2U/(n1 n2)`.
    pub r: f64,
    pub method: PMethod,
    pub median_x: f64,
    pub median_y: f64,
}

pub fn rank_biserial(u: f64, n1: usize, n2: usize) -> f64 {
    debug_assert!(n1 > 0 && n2 > 0);
    1.0 - 2.0 * u / (n1 * n2) as f64
}

/// Number of arrangements giving each U value, indexed by U (0..=n1*n2).
pub fn exact_u_counts(n1: usize, n2: usize) -> Vec<f64> {
    // counts[a][b] = distribution for sample sizes (a, b)
    let mut table: Vec<Vec<Vec<f64>>> = vec![vec![Vec::new(); n2 + 1]; n1 + 1];
    for a in 0..=n1 {
        for b in 0..=n2 {
            table[a][b] = if a == 0 || b == 0 {
                vec![1.0]
            } else {
                let mut v = vec![0.0; a * b + 1];
                // largest value belongs to the first sample: it beats all b
                for (u, c) in table[a - 1][b].iter().enumerate() {
                    v[u + b] += c;
                }
                for (u, c) in table[a][b - 1].iter().enumerate() {
                    v[u] += c;
                }
                v
            };
        }
    }
    std::mem::take(&mut table[n1][n2])
}

/// Two-sided exact p for an integer U under no ties.
pub fn exact_p(u: f64, n1: usize, n2: usize) -> f64 {
    let counts = exact_u_counts(n1, n2);
    let total: f64 = counts.iter().sum();
    let u = u.round() as usize;
    let lower: f64 = counts[..=u].iter().sum::<f64>() / total;
    let upper: f64 = counts[u..].iter().sum::<f64>() / total;
    (2.0 * lower.min(upper)).min(1.0)
}

/// Two-sided normal-approximation p with tie and continuity corrections.
/// `ties` lists the sizes of tied groups in the pooled sample.
pub fn normal_approx_p(u: f64, n1: usize, n2: usize, ties: &[usize]) -> f64 {
    let (a, b) = (n1 as f64, n2 as f64);
    let n = a + b;
    let tie_term: f64 = ties.iter().map(|&t| (t as f64).powi(3) - t as f64).sum();
    let correction = if n > 1.0 { tie_term / (n * (n - 1.0)) } else { 0.0 };
    let var = a * b / 12.0 * ((n + 1.0) - correction);
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((u - a * b / 2.0).abs() - 0.5).max(0.0) / var.sqrt();
    let sf = Normal::standard().sf(z);
    (2.0 * sf).min(1.0)
}

fn u_statistic(x: &[f64], y: &[f64]) -> f64 {
    let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
    let ranks = midranks(&pooled);
    let n1 = x.len() as f64;
    ranks[..x.len()].iter().sum::<f64>() - n1 * (n1 + 1.0) / 2.0
}

/// Mann-Whitney U test of `x` against `y`.
///
/// Exact p when the pooled sample has at most [`EXACT_MAX_N`] values and no
/// ties, normal approximation otherwise.
pub fn mann_whitney(x: &[f64], y: &[f64]) -> Result<MannWhitneyResult> {
    mann_whitney_with(x, y, None)
}

/// As [`mann_whitney`], optionally forcing the p-value method. Forcing the
/// exact method on tied data is an error.
pub fn mann_whitney_with(x: &[f64], y: &[f64], method: Option<PMethod>) -> Result<MannWhitneyResult> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::invalid("Mann-Whitney needs two non-empty samples"));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::invalid("Mann-Whitney samples must be finite"));
    }
    let (n1, n2) = (x.len(), y.len());
    let u = u_statistic(x, y);
    let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
    let ties = tie_groups(&pooled);
    let has_ties = ties.iter().any(|&t| t > 1);
    let method = method.unwrap_or(if n1 + n2 <= EXACT_MAX_N && !has_ties {
        PMethod::Exact
    } else {
        PMethod::NormalApprox
    });
    let p = match method {
        PMethod::Exact if has_ties => return Err(Error::invalid("exact p is only available without ties")),
        PMethod::Exact => exact_p(u, n1, n2),
        PMethod::NormalApprox => normal_approx_p(u, n1, n2, &ties),
    };
    Ok(MannWhitneyResult {
        u,
        n1,
        n2,
        p,
        r: rank_biserial(u, n1, n2),
        method,
        median_x: median(x).expect("non-empty"),
        median_y: median(y).expect("non-empty"),
    })
}
