use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng;

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Linear-interpolation quantile of sorted data.
pub(crate) fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Percentile bootstrap interval for `statistic`.
pub fn bootstrap_ci<F>(values: &[f64], statistic: F, replicates: usize, level: f64, seed: u64) -> Result<(f64, f64)>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if values.len() < 2 {
        return Err(Error::invalid("bootstrap needs at least two values"));
    }
    if replicates == 0 {
        return Err(Error::invalid("bootstrap needs at least one replicate"));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::invalid(format!("confidence level must lie in (0,1), got {level}")));
    }
    let n = values.len();
    let mut stats: Vec<f64> = (0..replicates as u64)
        .into_par_iter()
        .map(|b| {
            let mut r = rng::replicate(seed, b);
            let sample: Vec<f64> = (0..n).map(|_| values[r.random_range(0..n)]).collect();
            statistic(&sample)
        })
        .collect();
    stats.sort_by(f64::total_cmp);
    let alpha = 1.0 - level;
    Ok((quantile_sorted(&stats, alpha / 2.0), quantile_sorted(&stats, 1.0 - alpha / 2.0)))
}
