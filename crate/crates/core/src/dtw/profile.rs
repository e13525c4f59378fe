use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dba::{dba_barycenter, BarycenterPrototype, DbaOptions};
use super::series::ChannelSeries;
use super::warp::band_radius;
use crate::error::{Error, Result};
use crate::rng;
use crate::stats::{median, spearman};
use crate::types::Level;

pub const DEFAULT_BAND_FRACTION: f64 = 0.1;
pub const DEFAULT_SIGN_THRESHOLD: f64 = 0.1;
pub const DEFAULT_BOOTSTRAP: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DifferenceMap {
    pub channels: Vec<String>,
    pub length: usize,
    /// Row-major `length × channels`, High minus Low.
    pub values: Vec<f64>,
}

impl DifferenceMap {
    pub fn get(&self, t: usize, c: usize) -> f64 {
        self.values[t * self.channels.len() + c]
    }
}

pub fn difference_map(high: &BarycenterPrototype, low: &BarycenterPrototype) -> Result<DifferenceMap> {
    if high.length != low.length || high.channels != low.channels {
        return Err(Error::Shape(format!(
            "prototypes differ: {}×{} vs {}×{}",
            high.length,
            high.channels.len(),
            low.length,
            low.channels.len()
        )));
    }
    Ok(DifferenceMap {
        channels: high.channels.clone(),
        length: high.length,
        values: high.values.iter().zip(&low.values).map(|(h, l)| h - l).collect(),
    })
}

/// Mean difference per channel over the normalised timeline; positive means
/// more of that action among high performers.
pub fn effect_profile(diff: &DifferenceMap) -> Vec<f64> {
    let d = diff.channels.len();
    let mut out = vec![0.0; d];
    for row in diff.values.chunks(d) {
        for (o, v) in out.iter_mut().zip(row) {
            *o += v;
        }
    }
    out.iter_mut().for_each(|o| *o /= diff.length as f64);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DtwOptions {
    /// Band radius as a fraction of the target length, rounded up.
    pub band_fraction: f64,
    pub dba: DbaOptions,
}

impl Default for DtwOptions {
    fn default() -> Self {
        DtwOptions {
            band_fraction: DEFAULT_BAND_FRACTION,
            dba: DbaOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupContrast {
    pub length: usize,
    pub band_radius: f64,
    pub high: BarycenterPrototype,
    pub low: BarycenterPrototype,
    pub difference: DifferenceMap,
    pub effects: Vec<f64>,
}

fn split_by_level<'a>(series: &'a [ChannelSeries], levels: &[Level]) -> Result<(Vec<&'a ChannelSeries>, Vec<&'a ChannelSeries>)> {
    if series.len() != levels.len() {
        return Err(Error::Shape(format!("{} series but {} labels", series.len(), levels.len())));
    }
    let pick = |lv: Level| series.iter().zip(levels).filter(|(_, l)| **l == lv).map(|(s, _)| s).collect::<Vec<_>>();
    Ok((pick(Level::High), pick(Level::Low)))
}

fn contrast_of(high: &[ChannelSeries], low: &[ChannelSeries], length: usize, opts: &DtwOptions) -> Result<GroupContrast> {
    let band = band_radius(length, opts.band_fraction);
    let (h, l) = rayon::join(
        || dba_barycenter("High", high, length, band, &opts.dba),
        || dba_barycenter("Low", low, length, band, &opts.dba),
    );
    let (high, low) = (h?, l?);
    let difference = difference_map(&high, &low)?;
    let effects = effect_profile(&difference);
    Ok(GroupContrast {
        length,
        band_radius: band,
        high,
        low,
        difference,
        effects,
    })
}

/// High and Low prototypes at `length`, their difference map and effect profile.
pub fn group_contrast(series: &[ChannelSeries], levels: &[Level], length: usize, opts: &DtwOptions) -> Result<GroupContrast> {
    let (high, low) = split_by_level(series, levels)?;
    let high: Vec<ChannelSeries> = high.into_iter().cloned().collect();
    let low: Vec<ChannelSeries> = low.into_iter().cloned().collect();
    contrast_of(&high, &low, length, opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityScore {
    /// Baseline-weighted share of stable channels whose sign is reproduced.
    pub sign_agreement: f64,
    /// Spearman rho between profiles; 0 when undefined.
    pub rho: f64,
    /// `0.5 * sign_agreement + 0.5 * (rho + 1) / 2`.
    pub score: f64,
}

/// Agreement of a replicate effect profile with the baseline profile.
/// Channels with `|baseline| < sign_threshold` do not vote on sign.
pub fn stability_score(replicate: &[f64], baseline: &[f64], sign_threshold: f64) -> Result<StabilityScore> {
    if replicate.len() != baseline.len() {
        return Err(Error::Shape(format!("profiles differ in length: {} vs {}", replicate.len(), baseline.len())));
    }
    let mut weight = 0.0;
    let mut agree = 0.0;
    for (r, b) in replicate.iter().zip(baseline) {
        if b.abs() >= sign_threshold {
            weight += b.abs();
            if r.signum() == b.signum() && *r != 0.0 {
                agree += b.abs();
            }
        }
    }
    if weight == 0.0 {
        return Err(Error::degenerate("no stable channels"));
    }
    let sign_agreement = agree / weight;
    let rho = spearman(replicate, baseline).unwrap_or(0.0);
    Ok(StabilityScore {
        sign_agreement,
        rho,
        score: 0.5 * sign_agreement + 0.5 * (rho + 1.0) / 2.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionOptions {
    pub bootstrap: usize,
    pub sign_threshold: f64,
    pub seed: u64,
    pub dtw: DtwOptions,
}

impl Default for SelectionOptions {
    fn default() -> Self {
        SelectionOptions {
            bootstrap: DEFAULT_BOOTSTRAP,
            sign_threshold: DEFAULT_SIGN_THRESHOLD,
            seed: 0,
            dtw: DtwOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateStability {
    pub length: usize,
    pub mean: f64,
    pub se: f64,
    pub mean_sign_agreement: f64,
    pub mean_rho: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthSelectionReport {
    pub baseline_length: usize,
    pub baseline_effects: Vec<f64>,
    pub candidates: Vec<CandidateStability>,
    /// Candidate with the highest mean stability.
    pub best_length: usize,
    /// Smallest candidate within one standard error of the best.
    pub chosen_length: usize,
    pub bootstrap: usize,
    pub seed: u64,
}

fn draw(pool: &[&ChannelSeries], rng: &mut rng::Rng) -> Vec<ChannelSeries> {
    (0..pool.len()).map(|_| pool[rng.random_range(0..pool.len())].clone()).collect()
}

/// Bootstrap stability of the High-Low effect profile across target lengths,
/// resolved with the one-standard-error rule.
///
/// The baseline profile is computed on all sessions at the rounded median
/// session length. Replicate `b` resamples sessions with replacement within
/// each group using seed `seed + b`, so every candidate sees the same
/// resamples.
pub fn select_length(
    series: &[ChannelSeries],
    levels: &[Level],
    candidates: &[usize],
    opts: &SelectionOptions,
) -> Result<LengthSelectionReport> {
    if candidates.is_empty() {
        return Err(Error::invalid("no candidate lengths"));
    }
    if let Some(c) = candidates.iter().find(|c| **c < 2) {
        return Err(Error::invalid(format!("candidate length {c} is below 2")));
    }
    if opts.bootstrap == 0 {
        return Err(Error::invalid("at least one bootstrap replicate is required"));
    }
    let (high, low) = split_by_level(series, levels)?;
    if high.len() < 2 || low.len() < 2 {
        return Err(Error::invalid(format!(
            "each group needs at least two sessions (High {}, Low {})",
            high.len(),
            low.len()
        )));
    }
    let lengths: Vec<f64> = series.iter().map(|s| s.len() as f64).collect();
    let baseline_length = (median(&lengths).expect("non-empty").round() as usize).max(2);
    let all_high: Vec<ChannelSeries> = high.iter().map(|s| (*s).clone()).collect();
    let all_low: Vec<ChannelSeries> = low.iter().map(|s| (*s).clone()).collect();
    let baseline = contrast_of(&all_high, &all_low, baseline_length, &opts.dtw)?.effects;
    if baseline.iter().all(|b| b.abs() < opts.sign_threshold) {
        return Err(Error::degenerate("no stable channels"));
    }

    let jobs: Vec<(usize, u64)> = candidates
        .iter()
        .flat_map(|&l| (0..opts.bootstrap as u64).map(move |b| (l, b)))
        .collect();
    let scores = jobs
        .par_iter()
        .map(|&(length, b)| {
            let mut r = rng::replicate(opts.seed, b);
            let h = draw(&high, &mut r);
            let l = draw(&low, &mut r);
            let effects = contrast_of(&h, &l, length, &opts.dtw)?.effects;
            stability_score(&effects, &baseline, opts.sign_threshold)
        })
        .collect::<Result<Vec<_>>>()?;

    let nb = opts.bootstrap as f64;
    let stats: Vec<CandidateStability> = candidates
        .iter()
        .zip(scores.chunks(opts.bootstrap))
        .map(|(&length, chunk)| {
            let mean = chunk.iter().map(|s| s.score).sum::<f64>() / nb;
            let se = if chunk.len() > 1 {
                let var = chunk.iter().map(|s| (s.score - mean).powi(2)).sum::<f64>() / (nb - 1.0);
                (var / nb).sqrt()
            } else {
                0.0
            };
            CandidateStability {
                length,
                mean,
                se,
                mean_sign_agreement: chunk.iter().map(|s| s.sign_agreement).sum::<f64>() / nb,
                mean_rho: chunk.iter().map(|s| s.rho).sum::<f64>() / nb,
            }
        })
        .collect();

    let best = stats
        .iter()
        .reduce(|a, b| if b.mean > a.mean || (b.mean == a.mean && b.length < a.length) { b } else { a })
        .expect("non-empty");
    let cutoff = best.mean - best.se;
    let chosen = stats
        .iter()
        .filter(|c| c.mean >= cutoff)
        .map(|c| c.length)
        .min()
        .expect("best passes its own cutoff");
    Ok(LengthSelectionReport {
        baseline_length,
        baseline_effects: baseline,
        best_length: best.length,
        chosen_length: chosen,
        candidates: stats,
        bootstrap: opts.bootstrap,
        seed: opts.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn proto(group: &str, rows: &[Vec<f64>]) -> BarycenterPrototype {
        let d = rows[0].len();
        BarycenterPrototype {
            group: group.into(),
            channels: (0..d).map(|c| format!("c{c}")).collect(),
            length: rows.len(),
            values: rows.concat(),
            iterations: 0,
            inertia: 0.0,
            trace: vec![],
            converged: true,
        }
    }

    #[test]
    fn difference_and_profile() {
        let h = proto("h", &[vec![1.0, 0.5], vec![2.0, 0.5]]);
        let l = proto("l", &[vec![0.0, 0.0], vec![1.0, 0.0]]);
        let d = difference_map(&h, &l).unwrap();
        assert_eq!(d.values, vec![1.0, 0.5, 1.0, 0.5]);
        assert_eq!(effect_profile(&d), vec![1.0, 0.5]);
        let back = difference_map(&l, &h).unwrap();
        assert!(back.values.iter().zip(&d.values).all(|(a, b)| *a == -b));
        assert!(difference_map(&h, &h).unwrap().values.iter().all(|v| *v == 0.0));
        let short = proto("s", &[vec![0.0, 0.0], vec![0.0, 0.0], vec![0.0, 0.0]]);
        assert!(difference_map(&h, &short).is_err());

        let m = DifferenceMap {
            channels: vec!["c".into()],
            length: 4,
            values: vec![-1.0, 1.0, 0.0, 0.0],
        };
        assert_eq!(effect_profile(&m), vec![0.0]);
    }

    #[test]
    fn stability_extremes() {
        let base = [0.5, -0.3, 0.2, 0.9];
        let same = stability_score(&base, &base, 0.1).unwrap();
        assert_eq!((same.sign_agreement, same.rho, same.score), (1.0, 1.0, 1.0));
        let flipped: Vec<f64> = base.iter().map(|v| -v).collect();
        let s = stability_score(&flipped, &base, 0.1).unwrap();
        assert_eq!(s.score, 0.0);
        assert!(stability_score(&[1.0, 1.0], &[0.05, -0.05], 0.1).is_err());
    }

    #[test]
    fn sign_agreement_is_weighted() {
        // channel 0 (weight 0.6) agrees, channel 1 (weight 0.2) disagrees, channel 2 below threshold
        let s = stability_score(&[0.1, 0.3, -5.0], &[0.6, -0.2, 0.05], 0.1).unwrap();
        assert!((s.sign_agreement - 0.75).abs() < 1e-12);
    }
}
