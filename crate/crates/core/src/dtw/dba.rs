use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::series::{resample, ChannelSeries};
use super::warp::dtw_distance;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DbaOptions {
    pub max_iter: usize,
    /// Relative inertia improvement below which iteration stops.
    pub tol: f64,
}

impl Default for DbaOptions {
    fn default() -> Self {
        DbaOptions { max_iter: 30, tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarycenterPrototype {
    pub group: String,
    pub channels: Vec<String>,
    pub length: usize,
    /// Row-major `length × channels`.
    pub values: Vec<f64>,
    pub iterations: usize,
    pub inertia: f64,
    /// Inertia of the medoid followed by the inertia after every accepted update.
    pub trace: Vec<f64>,
    pub converged: bool,
}

impl BarycenterPrototype {
    pub fn get(&self, t: usize, c: usize) -> f64 {
        self.values[t * self.channels.len() + c]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.values.chunks(self.channels.len()).map(<[f64]>::to_vec).collect()
    }

    fn as_series(&self) -> ChannelSeries {
        ChannelSeries::from_parts(self.group.clone(), self.channels.clone(), self.length, self.values.clone(), true)
    }
}

type Path = Vec<(usize, usize)>;

fn inertia_and_paths(series: &[ChannelSeries], centre: &ChannelSeries, band: f64) -> Result<(f64, Vec<Path>)> {
    let aligned: Vec<_> = series
        .par_iter()
        .map(|s| dtw_distance(s, centre, band))
        .collect::<Result<Vec<_>>>()?;
    // fixed summation order keeps the total schedule-independent
    let total = aligned.iter().map(|a| a.cost).sum();
    Ok((total, aligned.into_iter().map(|a| a.path).collect()))
}

/// Index of the series with the smallest summed DTW distance to the others.
/// `series` must already be in unit_id order so ties go to the first id.
fn medoid(series: &[ChannelSeries], band: f64) -> Result<usize> {
    let n = series.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
    let costs = pairs
        .par_iter()
        .map(|&(i, j)| dtw_distance(&series[i], &series[j], band).map(|a| a.cost))
        .collect::<Result<Vec<f64>>>()?;
    let mut totals = vec![0.0; n];
    for (&(i, j), c) in pairs.iter().zip(&costs) {
        totals[i] += c;
        totals[j] += c;
    }
    let mut best = 0;
    for (k, t) in totals.iter().enumerate() {
        if *t < totals[best] {
            best = k;
        }
    }
    Ok(best)
}

/// DTW barycenter averaging.
///
/// Series are resampled to `length` when needed and processed in unit_id
/// order. The barycenter starts at the group medoid. Each update aligns every
/// series to the current barycenter and replaces each barycenter row by the
/// mean of the series rows warped onto it. An update that would raise the
/// inertia is discarded and iteration stops, so the recorded trace never
/// increases.
pub fn dba_barycenter(
    group: &str,
    series: &[ChannelSeries],
    length: usize,
    band: f64,
    opts: &DbaOptions,
) -> Result<BarycenterPrototype> {
    if series.is_empty() {
        return Err(Error::invalid(format!("group '{group}' is empty")));
    }
    let channels = series[0].channels().to_vec();
    if let Some(s) = series.iter().find(|s| s.channels() != channels) {
        return Err(Error::Shape(format!("series '{}' has a different channel set", s.unit_id())));
    }
    let mut ordered: Vec<ChannelSeries> = series
        .iter()
        .map(|s| if s.len() == length { Ok(s.clone()) } else { resample(s, length) })
        .collect::<Result<_>>()?;
    ordered.sort_by(|a, b| a.unit_id().cmp(b.unit_id()));

    let d = channels.len();
    let start = &ordered[medoid(&ordered, band)?];
    let mut proto = BarycenterPrototype {
        group: group.to_string(),
        channels,
        length,
        values: start.data().to_vec(),
        iterations: 0,
        inertia: 0.0,
        trace: Vec::new(),
        converged: false,
    };
    let (mut inertia, mut paths) = inertia_and_paths(&ordered, &proto.as_series(), band)?;
    proto.trace.push(inertia);

    while proto.iterations < opts.max_iter {
        proto.iterations += 1;
        let mut sums = vec![0.0; length * d];
        let mut counts = vec![0usize; length];
        for (s, path) in ordered.iter().zip(&paths) {
            for &(i, j) in path {
                counts[j] += 1;
                for (acc, v) in sums[j * d..(j + 1) * d].iter_mut().zip(s.row(i)) {
                    *acc += v;
                }
            }
        }
        let candidate: Vec<f64> = sums.iter().enumerate().map(|(k, v)| v / counts[k / d] as f64).collect();
        let candidate_series = ChannelSeries::from_parts(group.to_string(), proto.channels.clone(), length, candidate, true);
        let (next, next_paths) = inertia_and_paths(&ordered, &candidate_series, band)?;
        if next > inertia {
            proto.converged = true;
            break;
        }
        let old = inertia;
        proto.values = candidate_series.data().to_vec();
        inertia = next;
        paths = next_paths;
        proto.trace.push(inertia);
        if old == 0.0 || (old - next) / old < opts.tol {
            proto.converged = true;
            break;
        }
    }
    proto.inertia = inertia;
    Ok(proto)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::Rng;

    fn one(id: &str, v: &[f64]) -> ChannelSeries {
        let rows: Vec<Vec<f64>> = v.iter().map(|x| vec![*x]).collect();
        ChannelSeries::new(id, vec!["c".into()], &rows).unwrap()
    }

    #[test]
    fn two_constant_series_meet_halfway() {
        let g = [one("a", &[0.0, 0.0, 0.0]), one("b", &[2.0, 2.0, 2.0])];
        let p = dba_barycenter("g", &g, 3, 1.0, &DbaOptions::default()).unwrap();
        assert_eq!(p.values, vec![1.0, 1.0, 1.0]);
        assert_eq!(p.inertia, 6.0);
    }

    #[test]
    fn identical_copies_are_a_fixed_point() {
        let s = one("x", &[0.3, 1.7, -2.0, 0.0]);
        let g: Vec<_> = (0..4).map(|k| one(&format!("u{k}"), s.data())).collect();
        let p = dba_barycenter("g", &g, 4, 1.0, &DbaOptions::default()).unwrap();
        assert_eq!(p.values, s.data());
        assert_eq!((p.inertia, p.iterations), (0.0, 1));

        let single = dba_barycenter("g", std::slice::from_ref(&s), 4, 1.0, &DbaOptions::default()).unwrap();
        assert_eq!(single.values, s.data());
    }

    #[test]
    fn empty_group_is_error() {
        assert!(dba_barycenter("g", &[], 3, 1.0, &DbaOptions::default()).is_err());
    }

    #[test]
    fn trace_never_increases_and_order_is_irrelevant() {
        let mut r = rng::seeded(3);
        for _ in 0..20 {
            let n = r.random_range(2..6);
            let len = r.random_range(3..9);
            let g: Vec<ChannelSeries> = (0..n)
                .map(|k| {
                    let rows: Vec<Vec<f64>> = (0..len).map(|_| vec![r.random_range(-1.0..1.0), r.random_range(0.0..3.0)]).collect();
                    ChannelSeries::new(format!("u{k}"), vec!["a".into(), "b".into()], &rows).unwrap()
                })
                .collect();
            let p = dba_barycenter("g", &g, 6, 2.0, &DbaOptions::default()).unwrap();
            assert!(p.trace.windows(2).all(|w| w[1] <= w[0]));
            assert_eq!(*p.trace.last().unwrap(), p.inertia);
            let mut rev = g.clone();
            rev.reverse();
            assert_eq!(dba_barycenter("g", &rev, 6, 2.0, &DbaOptions::default()).unwrap(), p);
        }
    }
}
