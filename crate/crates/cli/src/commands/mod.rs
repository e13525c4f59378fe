use std::path::{Path, PathBuf};

use anyhow::{bail, Result};
use coloc_core::{Dimension, Level, TimelineMatrix};

use crate::io::{read_config, read_timelines, sidecar_report};
use crate::report::RunReport;
use crate::{Command, DimensionArg, GroupArgs};

mod coding;
mod data;
mod dtw;
mod ena;
mod eval;
mod merge;
mod stats;

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Irr(a) => eval::irr(&a),
        Command::EvalDet(a) => eval::eval_det(&a),
        Command::AssignSpaces(a) => coding::assign_spaces(&a),
        Command::Timeline(a) => coding::timeline(&a),
        Command::Ena(a) => ena::run(&a),
        Command::Dtw(a) => dtw::run(&a),
        Command::Stats(a) => stats::run(&a),
        Command::SampleFrames(a) => data::sample_frames(&a),
        Command::Split(a) => data::split(&a),
        Command::Mask(a) => data::mask(&a),
        Command::Report(a) => merge::run(&a),
    }
}

pub(crate) fn report_path(out: &Path, explicit: Option<&PathBuf>) -> PathBuf {
    explicit.cloned().unwrap_or_else(|| sidecar_report(out))
}

impl From<DimensionArg> for Dimension {
    fn from(d: DimensionArg) -> Self {
        match d {
            DimensionArg::Task => Dimension::Task,
            DimensionArg::Collaboration => Dimension::Collaboration,
        }
    }
}

/// Timelines with a rubric, their performance level, and the shared code list.
pub(crate) struct Units {
    pub timelines: Vec<TimelineMatrix>,
    pub levels: Vec<Level>,
    pub codes: Vec<String>,
}

pub(crate) fn load_units(args: &GroupArgs, report: &mut RunReport) -> Result<Units> {
    let cfg = read_config(&args.groups)?;
    let groups = cfg.groups(args.dimension.into());
    let mut timelines = Vec::new();
    let mut levels = Vec::new();
    for t in read_timelines(&args.timelines)? {
        match groups.get(t.unit_id()) {
            Some(g) => {
                if g.boundary {
                    report.warn(format!(
                        "session '{}' has a rubric mean of {:.3}, between the integer bands; assigned {:?}",
                        t.unit_id(),
                        g.mean,
                        g.level
                    ));
                }
                levels.push(g.level);
                timelines.push(t);
            }
            None => report.warn(format!("timeline '{}' has no rubric and is skipped", t.unit_id())),
        }
    }
    let Some(first) = timelines.first() else {
        bail!("no timeline in {} matches a rubric in {}", args.timelines.display(), args.groups.display());
    };
    let codes = first.codes().to_vec();
    if let Some(t) = timelines.iter().find(|t| t.codes() != codes.as_slice()) {
        bail!("timeline '{}' has different code columns from '{}'", t.unit_id(), first.unit_id());
    }
    Ok(Units { timelines, levels, codes })
}
