//! Analytics engine for time-stamped action-detection logs recorded in
//! co-located classrooms.
//!
//! The modules follow the analysis chain: ingestion and dataset utilities
//! ([`log`], [`sampling`], [`split`], [`groups`]), annotation and detector
//! evaluation ([`eval`]), spatial coding into per-second timelines
//! ([`spatial`], [`timeline`]), epistemic network analysis ([`ena`]),
//! DTW-barycenter temporal prototypes ([`dtw`]) and group statistics
//! ([`stats`]).

pub mod config;
pub mod dtw;
pub mod ena;
pub mod error;
pub mod eval;
pub mod groups;
pub mod log;
pub mod rng;
pub mod sampling;
pub mod spatial;
pub mod split;
pub mod stats;
pub mod timeline;
pub mod types;

pub use error::{Error, Result};
pub use timeline::TimelineMatrix;
pub use types::*;
