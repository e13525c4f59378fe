//! Nonparametric and resampling statistics.

mod adjust;
mod mann_whitney;
mod permanova;
mod rank;
mod resample;
mod ttest;

pub use adjust::{adjust, holm_adjust, AdjustMethod, AdjustedPValues};
pub use mann_whitney::{
    exact_p, exact_u_counts, mann_whitney, mann_whitney_with, normal_approx_p, rank_biserial, MannWhitneyResult,
    PMethod, EXACT_MAX_N,
};
pub use permanova::{permanova, Distance, PermanovaOptions, PermanovaResult, PermutationScheme, EXACT_LIMIT};
pub use rank::{median, midranks, pearson, spearman};
pub use resample::{bootstrap_ci, mean};
pub use ttest::{paired_t, PairedT};
