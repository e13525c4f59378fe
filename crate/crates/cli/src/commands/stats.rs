use anyhow::{bail, Result};
use coloc_core::stats::{adjust, mann_whitney, mean, permanova, AdjustMethod, Distance, MannWhitneyResult, PermanovaOptions, PermanovaResult};
use coloc_core::Level;
use serde::Serialize;

use super::{load_units, report_path};
use crate::io::{csv_bytes, fmt, write_atomic};
use crate::report::RunReport;
use crate::{AdjustArg, DistanceArg, Mode, StatsArgs};

#[derive(Serialize)]
struct CodeTest {
    code: String,
    test: MannWhitneyResult,
    p_adj: f64,
    mean_high: f64,
    mean_low: f64,
}

#[derive(Serialize)]
struct StatsResults {
    mode: Mode,
    adjust: AdjustMethod,
    n_high: usize,
    n_low: usize,
    tests: Vec<CodeTest>,
    permanova: PermanovaResult,
}

pub fn run(args: &StatsArgs) -> Result<()> {
    let mut report = RunReport::new("stats", args)?;
    let units = load_units(&args.input, &mut report)?;
    let spatial = units.codes.iter().all(|c| c.starts_with("prim_") || c.starts_with("sec_") || c.starts_with("dist_"));
    if (args.mode == Mode::Spatial) != spatial {
        bail!("timeline codes do not match --mode {:?}", args.mode);
    }

    // per-session share of seconds in which each code is active
    let profiles: Vec<Vec<f64>> = units.timelines.iter().map(|t| t.active_fractions()).collect();
    let by_level = |lv: Level, c: usize| -> Vec<f64> {
        profiles.iter().zip(&units.levels).filter(|(_, l)| **l == lv).map(|(p, _)| p[c]).collect()
    };

    let mut tests = Vec::new();
    for (c, code) in units.codes.iter().enumerate() {
        let high = by_level(Level::High, c);
        let low = by_level(Level::Low, c);
        let test = mann_whitney(&high, &low)?;
        tests.push(CodeTest {
            code: code.clone(),
            mean_high: mean(&high),
            mean_low: mean(&low),
            test,
            p_adj: f64::NAN,
        });
    }
    let method = match args.adjust {
        AdjustArg::Holm => AdjustMethod::Holm,
        AdjustArg::Bonferroni => AdjustMethod::Bonferroni,
    };
    let raw: Vec<f64> = tests.iter().map(|t| t.test.p).collect();
    let adjusted = adjust(&raw, method)?;
    for (t, p) in tests.iter_mut().zip(&adjusted.adjusted) {
        t.p_adj = *p;
    }

    let opts = PermanovaOptions {
        permutations: args.permutations,
        seed: args.seed,
        distance: match args.distance {
            DistanceArg::Euclidean => Distance::Euclidean,
            DistanceArg::Manhattan => Distance::Manhattan,
        },
        ..PermanovaOptions::default()
    };
    let perm = permanova(&profiles, &units.levels, &opts)?;

    let rows: Vec<Vec<String>> = tests
        .iter()
        .map(|t| {
            vec![
                t.code.clone(),
                fmt(t.test.u),
                fmt(t.test.p),
                fmt(t.p_adj),
                fmt(t.test.r),
                fmt(t.mean_high),
                fmt(t.mean_low),
            ]
        })
        .collect();
    let mut bytes = csv_bytes(&["code", "U", "p_raw", "p_adj", "r", "mean_high", "mean_low"], &rows)?;
    bytes.push(b'\n');
    bytes.extend(csv_bytes(
        &["permanova", "pseudo_f", "p", "permutations", "exact", "n_units", "n_groups"],
        &[vec![
            "profile".into(),
            fmt(perm.pseudo_f),
            fmt(perm.p),
            perm.permutations.to_string(),
            perm.exact.to_string(),
            perm.n_units.to_string(),
            perm.n_groups.to_string(),
        ]],
    )?);
    write_atomic(&args.out, &bytes)?;

    let results = StatsResults {
        mode: args.mode,
        adjust: method,
        n_high: units.levels.iter().filter(|l| l.is_high()).count(),
        n_low: units.levels.iter().filter(|l| !l.is_high()).count(),
        tests,
        permanova: perm,
    };
    report.results(results)?.write(&report_path(&args.out, args.report.as_ref()))
}
