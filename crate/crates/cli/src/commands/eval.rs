use anyhow::Result;
use coloc_core::eval::{evaluate_detector, irr_report, ClassAgreement};

use super::report_path;
use crate::io::{csv_bytes, fmt_opt, read_log, read_optional_config, write_atomic};
use crate::report::RunReport;
use crate::svg;
use crate::{EvalDetArgs, IrrArgs};

fn agreement_row(c: &ClassAgreement) -> Vec<String> {
    vec![
        c.class.clone(),
        c.counts.tp.to_string(),
        c.counts.fp.to_string(),
        c.counts.fn_.to_string(),
        fmt_opt(c.precision, 3),
        fmt_opt(c.recall, 3),
        fmt_opt(c.f1, 3),
    ]
}

pub fn irr(args: &IrrArgs) -> Result<()> {
    let cfg = read_optional_config(args.config.as_deref())?;
    let a = read_log(&args.a, &cfg.taxonomy)?;
    let b = read_log(&args.b, &cfg.taxonomy)?;
    let r = irr_report(&a, &b, &cfg.taxonomy, args.iou)?;

    let mut rows: Vec<Vec<String>> = r.classes.iter().map(agreement_row).collect();
    rows.push(agreement_row(&r.overall));
    write_atomic(&args.out, &csv_bytes(&["class", "tp", "fp", "fn", "precision", "recall", "f1"], &rows)?)?;

    let mut report = RunReport::new("irr", args)?;
    if r.frames_unpaired > 0 {
        report.warn(format!("{} frame(s) appear in only one log and were not compared", r.frames_unpaired));
    }
    match &r.kappa {
        Some(k) if k.degenerate_marginals => report.warn("kappa is undefined: both raters used a single label"),
        None => report.warn("kappa is undefined: no matched pairs"),
        _ => {}
    }
    if !r.gates.kappa || !r.gates.mean_iou {
        report.warn("reliability gates not met (kappa >= 0.80 and mean IoU >= 0.70)");
    }
    report.results(&r)?.write(&report_path(&args.out, args.report.as_ref()))
}

pub fn eval_det(args: &EvalDetArgs) -> Result<()> {
    let cfg = read_optional_config(args.config.as_deref())?;
    let pred = read_log(&args.pred, &cfg.taxonomy)?;
    let gt = read_log(&args.gt, &cfg.taxonomy)?;
    let r = evaluate_detector(&pred, &gt, &cfg.taxonomy, args.conf)?;

    let mut rows: Vec<Vec<String>> = r
        .classes
        .iter()
        .map(|c| {
            vec![
                c.class.clone(),
                c.n_ground_truth.to_string(),
                fmt_opt(c.precision, 6),
                fmt_opt(c.recall, 6),
                fmt_opt(c.ap50, 6),
                fmt_opt(c.ap50_95, 6),
            ]
        })
        .collect();
    rows.push(vec![
        "all".into(),
        r.classes.iter().map(|c| c.n_ground_truth).sum::<usize>().to_string(),
        fmt_opt(r.mean_precision, 6),
        fmt_opt(r.mean_recall, 6),
        fmt_opt(r.map50, 6),
        fmt_opt(r.map50_95, 6),
    ]);
    write_atomic(
        &args.out,
        &csv_bytes(&["class", "n_gt", "precision", "recall", "ap50", "ap50_95"], &rows)?,
    )?;
    if let Some(p) = &args.svg {
        write_atomic(p, svg::pr_curve_svg(&r.curves).as_bytes())?;
    }
    if let Some(p) = &args.confusion_svg {
        write_atomic(p, svg::confusion_svg(&r.confusion).as_bytes())?;
    }

    let mut report = RunReport::new("eval-det", args)?;
    for c in r.classes.iter().filter(|c| c.n_ground_truth == 0) {
        report.warn(format!("class '{}' has no ground-truth instances", c.class));
    }
    report.results(&r)?.write(&report_path(&args.out, args.report.as_ref()))
}
