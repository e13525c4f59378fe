//! Dataset partitioning: stratified train/validation/test splits, k-fold
//! splits, and the class-imbalance check.

use std::collections::BTreeMap;
use std::fmt::Display;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng;

pub const DEFAULT_RATIOS: [f64; 3] = [0.70, 0.20, 0.10];

#[derive(Debug, Clone, PartialEq)]
pub struct SplitOutcome<T> {
    pub train: Vec<T>,
    pub validation: Vec<T>,
    pub test: Vec<T>,
    pub warnings: Vec<String>,
}

impl<T> SplitOutcome<T> {
    pub fn parts(&self) -> [&[T]; 3] {
        [&self.train, &self.validation, &self.test]
    }
}

fn check_ratios(ratios: &[f64; 3]) -> Result<()> {
    if ratios.iter().any(|r| !r.is_finite() || *r < 0.0) {
        return Err(Error::invalid(format!("split ratios must be non-negative, got {ratios:?}")));
    }
    let sum: f64 = ratios.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!("split ratios must sum to 1, got {sum}")));
    }
    Ok(())
}

/// Largest-remainder apportionment of `n` items over `ratios`.
/// Equal remainders favour the earlier split.
pub fn split_counts(n: usize, ratios: &[f64; 3]) -> [usize; 3] {
    let mut counts = [0usize; 3];
    let mut remainders = [0i64; 3];
    for i in 0..3 {
        let quota = n as f64 * ratios[i];
        let whole = (quota + 1e-9).floor();
        counts[i] = whole as usize;
        // quantised so that 0.4 and 0.39999999999999997 compare equal
        remainders[i] = ((quota - whole).max(0.0) * 1e9).round() as i64;
    }
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..3).filter(|&i| ratios[i] > 0.0).collect();
    order.sort_by_key(|&i| (-remainders[i], i));
    for &i in order.iter().cycle().take(n.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

/// Per-class split following `ratios`, shuffled with `seed`.
pub fn stratified_split<T, C>(instances: &[(T, C)], ratios: [f64; 3], seed: u64) -> Result<SplitOutcome<T>>
where
    T: Clone,
    C: Ord + Clone + Display,
{
    check_ratios(&ratios)?;
    let mut by_class: BTreeMap<C, Vec<T>> = BTreeMap::new();
    for (id, class) in instances {
        by_class.entry(class.clone()).or_default().push(id.clone());
    }
    let nonzero = ratios.iter().filter(|r| **r > 0.0).count();
    let largest = (0..3)
        .max_by(|&a, &b| ratios[a].total_cmp(&ratios[b]).then(b.cmp(&a)))
        .unwrap_or(0);

    let mut rng = rng::seeded(seed);
    let mut out = SplitOutcome {
        train: Vec::new(),
        validation: Vec::new(),
        test: Vec::new(),
        warnings: Vec::new(),
    };
    for (class, mut ids) in by_class {
        ids.shuffle(&mut rng);
        let counts = if ids.len() < nonzero {
            out.warnings.push(format!(
                "class '{class}' has {} instance(s) for {nonzero} non-empty splits; assigned to split {largest}",
                ids.len()
            ));
            let mut c = [0; 3];
            c[largest] = ids.len();
            c
        } else {
            split_counts(ids.len(), &ratios)
        };
        let mut it = ids.into_iter();
        out.train.extend(it.by_ref().take(counts[0]));
        out.validation.extend(it.by_ref().take(counts[1]));
        out.test.extend(it);
    }
    Ok(out)
}

/// `k` disjoint folds whose sizes differ by at most one.
pub fn kfold_splits<T: Clone>(ids: &[T], k: usize, seed: u64) -> Result<Vec<Vec<T>>> {
    if k < 2 {
        return Err(Error::invalid(format!("k must be at least 2, got {k}")));
    }
    if ids.len() < k {
        return Err(Error::invalid(format!("{} ids cannot fill {k} folds", ids.len())));
    }
    let mut shuffled = ids.to_vec();
    shuffled.shuffle(&mut rng::seeded(seed));
    let base = ids.len() / k;
    let extra = ids.len() % k;
    let mut it = shuffled.into_iter();
    Ok((0..k)
        .map(|f| it.by_ref().take(base + usize::from(f < extra)).collect())
        .collect())
}

/// Ratio of the largest to the smallest class count, and whether it exceeds `limit`.
pub fn imbalance_ratio<I>(counts: I, limit: f64) -> Result<(f64, bool)>
where
    I: IntoIterator<Item = usize>,
{
    let counts: Vec<usize> = counts.into_iter().collect();
    let (Some(&min), Some(&max)) = (counts.iter().min(), counts.iter().max()) else {
        return Err(Error::invalid("no classes given"));
    };
    if min == 0 {
        return Err(Error::degenerate("a class has zero instances; imbalance ratio undefined"));
    }
    let ratio = max as f64 / min as f64;
    Ok((ratio, ratio > limit))
}
