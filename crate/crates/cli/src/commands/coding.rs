use std::collections::BTreeMap;

use anyhow::{bail, Context, Result};
use coloc_core::spatial::{build_timeline, CodingMode, SpatialContext, SpatialOutcome};
use coloc_core::{FrameRecord, Zone};
use serde::Serialize;

use super::report_path;
use crate::io::{read_config, read_log, read_optional_config, write_atomic};
use crate::report::RunReport;
use crate::{AssignArgs, Mode, TimelineArgs};

#[derive(Serialize)]
struct CodedDetection<'a> {
    label: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    confidence: Option<f64>,
    #[serde(rename = "box")]
    bbox: [f64; 4],
    space: &'a str,
    zone: Zone,
    /// `None` for detections removed by the filter.
    code: Option<String>,
}

#[derive(Serialize)]
struct CodedFrame<'a> {
    session_id: &'a str,
    t: f64,
    source: &'a str,
    detections: Vec<CodedDetection<'a>>,
}

pub fn assign_spaces(args: &AssignArgs) -> Result<()> {
    let cfg = read_config(&args.config)?;
    let frames = read_log(&args.log, &cfg.taxonomy)?;
    let ctx = SpatialContext::new(cfg.space_map()?.clone(), cfg.spatial_codes()?, cfg.spatial.distraction);

    let mut out = Vec::new();
    let mut per_code: BTreeMap<String, usize> = BTreeMap::new();
    let mut filtered = 0usize;
    for f in &frames {
        let mut detections = Vec::with_capacity(f.detections.len());
        for d in &f.detections {
            let (space, outcome) = ctx.code_detection(&d.label, &d.bbox, &cfg.taxonomy)?;
            let code = match outcome {
                SpatialOutcome::Code(c) => {
                    *per_code.entry(c.clone()).or_default() += 1;
                    Some(c)
                }
                SpatialOutcome::Filtered => {
                    filtered += 1;
                    None
                }
            };
            detections.push(CodedDetection {
                label: &d.label,
                confidence: d.confidence,
                bbox: d.bbox.to_array(),
                space: &space.name,
                zone: space.zone,
                code,
            });
        }
        let line = CodedFrame {
            session_id: &f.session_id,
            t: f.t,
            source: &f.source,
            detections,
        };
        serde_json::to_writer(&mut out, &line)?;
        out.push(b'\n');
    }
    write_atomic(&args.out, &out)?;

    #[derive(Serialize)]
    struct Summary {
        frames: usize,
        filtered: usize,
        codes: BTreeMap<String, usize>,
    }
    RunReport::new("assign-spaces", args)?
        .results(Summary {
            frames: frames.len(),
            filtered,
            codes: per_code,
        })?
        .write(&report_path(&args.out, args.report.as_ref()))
}

pub fn timeline(args: &TimelineArgs) -> Result<()> {
    let cfg = read_optional_config(args.config.as_deref())?;
    let frames = read_log(&args.log, &cfg.taxonomy)?;
    if frames.is_empty() {
        bail!("detection log {} is empty", args.log.display());
    }
    let ctx = match args.mode {
        Mode::Plain => None,
        Mode::Spatial => {
            if args.config.is_none() {
                bail!("spatial timelines need --config with a space map");
            }
            Some(SpatialContext::new(cfg.space_map()?.clone(), cfg.spatial_codes()?, cfg.spatial.distraction))
        }
    };
    let mode = ctx.as_ref().map_or(CodingMode::Plain, CodingMode::Spatial);

    let mut sessions: BTreeMap<&str, Vec<FrameRecord>> = BTreeMap::new();
    for f in &frames {
        sessions.entry(&f.session_id).or_default().push(f.clone());
    }
    let single_file = sessions.len() == 1 && args.out.extension().is_some_and(|e| e == "csv");

    #[derive(Serialize)]
    struct Written {
        session_id: String,
        path: String,
        seconds: usize,
        t0: i64,
        active_fraction: Vec<f64>,
    }
    let mut written = Vec::new();
    let mut codes = Vec::new();
    for (sid, fs) in &sessions {
        let tl = build_timeline(fs, &cfg.taxonomy, mode)?;
        let path = if single_file {
            args.out.clone()
        } else {
            args.out.join(format!("{sid}.csv"))
        };
        let mut bytes = Vec::new();
        tl.write_csv(&mut bytes)?;
        write_atomic(&path, &bytes).with_context(|| format!("writing timeline for session '{sid}'"))?;
        codes = tl.codes().to_vec();
        written.push(Written {
            session_id: sid.to_string(),
            path: path.display().to_string(),
            seconds: tl.rows(),
            t0: tl.t0(),
            active_fraction: tl.active_fractions(),
        });
    }

    #[derive(Serialize)]
    struct Summary {
        mode: &'static str,
        codes: Vec<String>,
        sessions: Vec<Written>,
    }
    let default_report = if single_file {
        args.out.with_extension("json")
    } else {
        args.out.join("timeline.json")
    };
    RunReport::new("timeline", args)?
        .results(Summary {
            mode: mode.name(),
            codes,
            sessions: written,
        })?
        .write(args.report.as_ref().unwrap_or(&default_report))
}
