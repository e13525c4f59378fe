use std::collections::BTreeMap;

use anyhow::{bail, Result};
use coloc_core::sampling::{mask_regions, plan_frame_samples};
use coloc_core::split::{imbalance_ratio, kfold_splits, stratified_split};
use serde::Serialize;

use super::report_path;
use crate::io::{csv_bytes, read_config, read_log, read_optional_config, write_atomic};
use crate::report::RunReport;
use crate::{MaskArgs, SampleArgs, SplitArgs};

pub fn sample_frames(args: &SampleArgs) -> Result<()> {
    let cfg = read_config(&args.config)?;
    if cfg.sessions.is_empty() {
        bail!("configuration {} lists no sessions", args.config.display());
    }
    let mut rows = Vec::new();
    let mut per_session = BTreeMap::new();
    for s in &cfg.sessions {
        let times = plan_frame_samples(s, args.interval)?;
        per_session.insert(s.session_id.clone(), times.len());
        rows.extend(times.iter().map(|t| vec![s.session_id.clone(), format!("{t}")]));
    }
    write_atomic(&args.out, &csv_bytes(&["session_id", "t"], &rows)?)?;
    RunReport::new("sample-frames", args)?
        .results(per_session)?
        .write(&report_path(&args.out, args.report.as_ref()))
}

pub fn split(args: &SplitArgs) -> Result<()> {
    let cfg = read_optional_config(args.config.as_deref())?;
    let frames = read_log(&args.log, &cfg.taxonomy)?;
    let instances: Vec<(String, String)> = frames
        .iter()
        .flat_map(|f| {
            f.detections
                .iter()
                .enumerate()
                .map(move |(k, d)| (format!("{}/{}/{}/{k}", f.session_id, f.t, f.source), d.label.clone()))
        })
        .collect();
    if instances.is_empty() {
        bail!("detection log {} holds no instances", args.log.display());
    }
    let class_of: BTreeMap<&str, &str> = instances.iter().map(|(i, c)| (i.as_str(), c.as_str())).collect();
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for (_, c) in &instances {
        *counts.entry(c).or_default() += 1;
    }

    let mut report = RunReport::new("split", args)?;
    let (ratio, flagged) = imbalance_ratio(counts.values().copied(), cfg.thresholds.imbalance_limit)?;
    if flagged {
        report.warn(format!(
            "class imbalance {ratio:.2}:1 exceeds {}:1",
            cfg.thresholds.imbalance_limit
        ));
    }

    let parts: Vec<(String, Vec<String>)> = match args.kfold {
        Some(k) => {
            let ids: Vec<String> = instances.iter().map(|(i, _)| i.clone()).collect();
            kfold_splits(&ids, k, args.seed)?
                .into_iter()
                .enumerate()
                .map(|(f, ids)| (format!("fold{}", f + 1), ids))
                .collect()
        }
        None => {
            let [train, val, test] = args.ratios[..] else {
                bail!("--ratios needs exactly three values, got {}", args.ratios.len());
            };
            let out = stratified_split(&instances, [train, val, test], args.seed)?;
            for w in &out.warnings {
                report.warn(w.clone());
            }
            vec![
                ("train".into(), out.train),
                ("validation".into(), out.validation),
                ("test".into(), out.test),
            ]
        }
    };
    let mut rows = Vec::new();
    for (name, ids) in &parts {
        rows.extend(ids.iter().map(|i| vec![i.clone(), class_of[i.as_str()].to_string(), name.clone()]));
    }
    write_atomic(&args.out, &csv_bytes(&["id", "class", "split"], &rows)?)?;

    #[derive(Serialize)]
    struct Summary<'a> {
        class_counts: &'a BTreeMap<&'a str, usize>,
        imbalance_ratio: f64,
        imbalance_flag: bool,
        sizes: BTreeMap<&'a str, usize>,
    }
    let summary = Summary {
        class_counts: &counts,
        imbalance_ratio: ratio,
        imbalance_flag: flagged,
        sizes: parts.iter().map(|(n, ids)| (n.as_str(), ids.len())).collect(),
    };
    report.results(summary)?.write(&report_path(&args.out, args.report.as_ref()))
}

pub fn mask(args: &MaskArgs) -> Result<()> {
    let cfg = read_optional_config(args.config.as_deref())?;
    let fraction = args.fraction.unwrap_or(cfg.thresholds.mask_fraction);
    let frames = read_log(&args.log, &cfg.taxonomy)?;
    let mut rows = Vec::new();
    for f in &frames {
        let boxes: Vec<_> = f.detections.iter().map(|d| d.bbox).collect();
        for (k, m) in mask_regions(&boxes, fraction)?.iter().enumerate() {
            let [x1, y1, x2, y2] = m.to_array();
            rows.push(vec![
                f.session_id.clone(),
                format!("{}", f.t),
                f.source.clone(),
                k.to_string(),
                format!("{x1}"),
                format!("{y1}"),
                format!("{x2}"),
                format!("{y2}"),
            ]);
        }
    }
    write_atomic(
        &args.out,
        &csv_bytes(&["session_id", "t", "source", "index", "x1", "y1", "x2", "y2"], &rows)?,
    )?;
    #[derive(Serialize)]
    struct Summary {
        fraction: f64,
        masks: usize,
    }
    RunReport::new("mask", args)?
        .results(Summary { fraction, masks: rows.len() })?
        .write(&report_path(&args.out, args.report.as_ref()))
}
