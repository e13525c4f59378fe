//! Temporal prototypes: global scaling, resampling, band-constrained DTW,
//! barycenter averaging per group and bootstrap selection of the target length.

mod dba;
mod profile;
mod series;
mod warp;

pub use dba::{dba_barycenter, BarycenterPrototype, DbaOptions};
pub use profile::{
    difference_map, effect_profile, group_contrast, select_length, stability_score, CandidateStability, DifferenceMap,
    DtwOptions, GroupContrast, LengthSelectionReport, SelectionOptions, StabilityScore, DEFAULT_BAND_FRACTION,
    DEFAULT_BOOTSTRAP, DEFAULT_SIGN_THRESHOLD,
};
pub use series::{resample, ChannelSeries, GlobalScaler};
pub use warp::{band_radius, dtw_distance, in_band, Alignment};
