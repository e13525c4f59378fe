use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Label arrangements up to this count are enumerated exactly.
pub const EXACT_LIMIT: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distance {
    #[default]
    Euclidean,
    Manhattan,
}

impl Distance {
    fn between(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Distance::Euclidean => a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt(),
            Distance::Manhattan => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PermutationScheme {
    /// Exact when the arrangement count is at most [`EXACT_LIMIT`], Monte Carlo otherwise.
    #[default]
    Auto,
    MonteCarlo,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PermanovaOptions {
    pub permutations: usize,
    pub seed: u64,
    pub distance: Distance,
    pub scheme: PermutationScheme,
}

impl Default for PermanovaOptions {
    fn default() -> Self {
        PermanovaOptions {
            permutations: 999,
            seed: 0,
            distance: Distance::Euclidean,
            scheme: PermutationScheme::Auto,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PermanovaResult {
    pub pseudo_f: f64,
    pub p: f64,
    /// Arrangements evaluated: all of them when `exact`, else the Monte Carlo count.
    pub permutations: u64,
    pub exact: bool,
    pub ss_total: f64,
    pub ss_within: f64,
    pub ss_between: f64,
    pub n_units: usize,
    pub n_groups: usize,
}

struct Design {
    sq: Vec<f64>,
    n: usize,
    n_groups: usize,
    ss_total: f64,
}

impl Design {
    fn d2(&self, i: usize, j: usize) -> f64 {
        self.sq[i * self.n + j]
    }

    fn ss_within(&self, groups: &[usize]) -> f64 {
        let mut sums = vec![0.0; self.n_groups];
        let mut sizes = vec![0usize; self.n_groups];
        for (i, &g) in groups.iter().enumerate() {
            sizes[g] += 1;
            for (j, &h) in groups.iter().enumerate().skip(i + 1) {
                if h == g {
                    sums[g] += self.d2(i, j);
                }
            }
        }
        sums.iter().zip(&sizes).map(|(s, &n)| s / n as f64).sum()
    }

    fn pseudo_f(&self, groups: &[usize]) -> f64 {
        let ssw = self.ss_within(groups);
        let ssb = self.ss_total - ssw;
        let (n, g) = (self.n as f64, self.n_groups as f64);
        if ssw <= 0.0 {
            return f64::INFINITY;
        }
        (ssb / (g - 1.0)) / (ssw / (n - g))
    }
}

/// Number of distinct label arrangements, or `None` once it passes `cap`.
fn arrangement_count(sizes: &[usize], cap: u64) -> Option<u64> {
    // product of binomials C(remaining, size)
    let mut remaining: u64 = sizes.iter().sum::<usize>() as u64;
    let mut total: u128 = 1;
    for &s in sizes {
        let mut c: u128 = 1;
        for k in 0..s as u128 {
            c = c * (remaining as u128 - k) / (k + 1);
        }
        total = total.checked_mul(c)?;
        if total > cap as u128 {
            return None;
        }
        remaining -= s as u64;
    }
    Some(total as u64)
}

/// Calls `visit` on every distinct arrangement of the multiset `labels`.
fn for_each_arrangement(counts: &mut [usize], slot: usize, current: &mut Vec<usize>, n: usize, visit: &mut dyn FnMut(&[usize])) {
    if slot == n {
        visit(current);
        return;
    }
    for g in 0..counts.len() {
        if counts[g] == 0 {
            continue;
        }
        counts[g] -= 1;
        current.push(g);
        for_each_arrangement(counts, slot + 1, current, n, visit);
        current.pop();
        counts[g] += 1;
    }
}

/// PERMANOVA pseudo-F on `units` (rows of features) grouped by `labels`.
pub fn permanova<G: Ord + Clone>(units: &[Vec<f64>], labels: &[G], opts: &PermanovaOptions) -> Result<PermanovaResult> {
    if units.len() != labels.len() {
        return Err(Error::Shape(format!("{} units but {} labels", units.len(), labels.len())));
    }
    let n = units.len();
    if let Some(u) = units.iter().find(|u| u.len() != units[0].len()) {
        return Err(Error::Shape(format!("feature rows differ in length ({} vs {})", u.len(), units[0].len())));
    }
    let mut distinct: Vec<G> = labels.to_vec();
    distinct.sort();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::invalid("PERMANOVA needs at least two groups"));
    }
    if opts.permutations == 0 && opts.scheme != PermutationScheme::Exact {
        return Err(Error::invalid("at least one permutation is required"));
    }
    let groups: Vec<usize> = labels
        .iter()
        .map(|l| distinct.binary_search(l).expect("label present"))
        .collect();

    let mut sq = vec![0.0; n * n];
    let mut total = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = opts.distance.between(&units[i], &units[j]);
            sq[i * n + j] = d * d;
            sq[j * n + i] = d * d;
            total += d * d;
        }
    }
    let design = Design {
        sq,
        n,
        n_groups: distinct.len(),
        ss_total: total / n as f64,
    };
    let ss_within = design.ss_within(&groups);
    if ss_within <= 0.0 {
        return Err(Error::degenerate("degenerate within-group variance"));
    }
    let f_obs = design.pseudo_f(&groups);
    // relative slack so arrangements equal to the observed one count as extreme
    let cut = f_obs - 1e-10 * f_obs.abs().max(1e-300);

    let mut sizes = vec![0usize; design.n_groups];
    for &g in &groups {
        sizes[g] += 1;
    }
    let arrangements = arrangement_count(&sizes, EXACT_LIMIT);
    let exact = match opts.scheme {
        PermutationScheme::Exact => true,
        PermutationScheme::MonteCarlo => false,
        PermutationScheme::Auto => arrangements.is_some(),
    };

    let (p, permutations) = if exact {
        let mut hits = 0u64;
        let mut seen = 0u64;
        let mut current = Vec::with_capacity(n);
        for_each_arrangement(&mut sizes, 0, &mut current, n, &mut |arr| {
            seen += 1;
            if design.pseudo_f(arr) >= cut {
                hits += 1;
            }
        });
        (hits as f64 / seen as f64, seen)
    } else {
        let hits: u64 = (0..opts.permutations as u64)
            .into_par_iter()
            .map(|b| {
                let mut perm = groups.clone();
                perm.shuffle(&mut rng::replicate(opts.seed, b));
                u64::from(design.pseudo_f(&perm) >= cut)
            })
            .sum();
        ((hits + 1) as f64 / (opts.permutations as f64 + 1.0), opts.permutations as u64)
    };

    Ok(PermanovaResult {
        pseudo_f: f_obs,
        p,
        permutations,
        exact,
        ss_total: design.ss_total,
        ss_within,
        ss_between: design.ss_total - ss_within,
        n_units: n,
        n_groups: design.n_groups,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64)]) -> Vec<Vec<f64>> {
        v.iter().map(|(a, b)| vec![*a, *b]).collect()
    }

    #[test]
    fn identical_groups_have_zero_f() {
        let units = pts(&[(0.0, 0.0), (1.0, 2.0), (0.0, 0.0), (1.0, 2.0)]);
        let r = permanova(&units, &["a", "a", "b", "b"], &PermanovaOptions::default()).unwrap();
        assert!(r.ss_between.abs() < 1e-12);
        assert!(r.pseudo_f.abs() < 1e-12);
        assert_eq!(r.p, 1.0);
    }

    #[test]
    fn separated_pairs_exact_p() {
        let units = pts(&[(0.0, 0.0), (0.0, 1.0), (10.0, 0.0), (10.0, 1.0)]);
        let r = permanova(&units, &[0, 0, 1, 1], &PermanovaOptions::default()).unwrap();
        assert!(r.exact);
        assert_eq!(r.permutations, 6);
        // the observed split and its mirror are the only maximal arrangements
        assert!((r.p - 2.0 / 6.0).abs() < 1e-12);
        // SST = (1/4)(1+100+101+101+100+1) = 101, SSW = (1/2)(1) + (1/2)(1) = 1
        assert!((r.ss_total - 101.0).abs() < 1e-9);
        assert!((r.ss_within - 1.0).abs() < 1e-9);
        assert!((r.pseudo_f - 200.0).abs() < 1e-9);
    }

    #[test]
    fn errors() {
        let units = pts(&[(0.0, 0.0), (1.0, 1.0)]);
        assert!(permanova(&units, &[0, 0], &PermanovaOptions::default()).is_err());
        assert!(matches!(
            permanova(&units, &[0, 1], &PermanovaOptions::default()),
            Err(Error::Degenerate(_))
        ));
        assert!(permanova(&units, &[0], &PermanovaOptions::default()).is_err());
    }

    #[test]
    fn arrangement_counts() {
        assert_eq!(arrangement_count(&[2, 2], 100), Some(6));
        assert_eq!(arrangement_count(&[3, 3, 2], 1000), Some(560));
        assert_eq!(arrangement_count(&[20, 20], 10_000), None);
    }

    #[test]
    fn monte_carlo_is_seed_deterministic() {
        let units: Vec<Vec<f64>> = (0..30).map(|i| vec![f64::from(i % 7), f64::from(i % 5)]).collect();
        let labels: Vec<u8> = (0..30).map(|i| u8::from(i < 15)).collect();
        let opts = PermanovaOptions { permutations: 199, seed: 11, ..Default::default() };
        let a = permanova(&units, &labels, &opts).unwrap();
        assert!(!a.exact);
        assert_eq!(a, permanova(&units, &labels, &opts).unwrap());
    }
}
