use crate::error::{Error, Result};

use super::series::ChannelSeries;

/// Sakoe-Chiba radius for a target length: `ceil(fraction * length)`.
pub fn band_radius(length: usize, fraction: f64) -> f64 {
    (fraction * length as f64).ceil()
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Cell `(i, j)` lies inside the band around the rescaled diagonal.
pub fn in_band(i: usize, j: usize, n: usize, m: usize, radius: f64) -> bool {
    let centre = i as f64 * m as f64 / n as f64;
    (centre - j as f64).abs() <= radius + 1e-9
}

#[derive(Debug, Clone, PartialEq)]
pub struct Alignment {
    pub cost: f64,
    /// Warping path from `(0, 0)` to `(n-1, m-1)` as (index into a, index into b).
    pub path: Vec<(usize, usize)>,
}

/// Dynamic time warping under a Sakoe-Chiba band.
///
/// Local cost is the Euclidean distance between rows, summed along the path
/// with steps (1,0), (0,1), (1,1). `f64::INFINITY` disables the band. When
/// several paths are optimal the diagonal step is preferred, then (1,0).
pub fn dtw_distance(a: &ChannelSeries, b: &ChannelSeries, band: f64) -> Result<Alignment> {
    if a.dims() != b.dims() {
        return Err(Error::Shape(format!("{} channels vs {}", a.dims(), b.dims())));
    }
    let (n, m) = (a.len(), b.len());
    dtw_rows(n, m, band, |i, j| euclidean(a.row(i), b.row(j)))
}

pub(crate) fn dtw_rows(n: usize, m: usize, band: f64, cost: impl Fn(usize, usize) -> f64) -> Result<Alignment> {
    if n == 0 || m == 0 {
        return Err(Error::invalid("cannot align an empty series"));
    }
    if band.is_nan() || band < 0.0 {
        return Err(Error::invalid(format!("band radius must be non-negative, got {band}")));
    }
    if band < n.abs_diff(m) as f64 {
        return Err(Error::invalid(format!(
            "infeasible band: radius {band} is below the length difference {}",
            n.abs_diff(m)
        )));
    }
    let idx = |i: usize, j: usize| i * m + j;
    let mut acc = vec![f64::INFINITY; n * m];
    for i in 0..n {
        for j in 0..m {
            if !in_band(i, j, n, m, band) {
                continue;
            }
            let c = cost(i, j);
            acc[idx(i, j)] = if i == 0 && j == 0 {
                c
            } else {
                let diag = if i > 0 && j > 0 { acc[idx(i - 1, j - 1)] } else { f64::INFINITY };
                let up = if i > 0 { acc[idx(i - 1, j)] } else { f64::INFINITY };
                let left = if j > 0 { acc[idx(i, j - 1)] } else { f64::INFINITY };
                c + diag.min(up).min(left)
            };
        }
    }
    let total = acc[idx(n - 1, m - 1)];
    if !total.is_finite() {
        return Err(Error::invalid(format!("infeasible band: radius {band} admits no warping path")));
    }

    let mut path = vec![(n - 1, m - 1)];
    let (mut i, mut j) = (n - 1, m - 1);
    while i > 0 || j > 0 {
        let diag = if i > 0 && j > 0 { acc[idx(i - 1, j - 1)] } else { f64::INFINITY };
        let up = if i > 0 { acc[idx(i - 1, j)] } else { f64::INFINITY };
        let left = if j > 0 { acc[idx(i, j - 1)] } else { f64::INFINITY };
        if diag <= up && diag <= left {
            i -= 1;
            j -= 1;
        } else if up <= left {
            i -= 1;
        } else {
            j -= 1;
        }
        path.push((i, j));
    }
    path.reverse();
    Ok(Alignment { cost: total, path })
}
