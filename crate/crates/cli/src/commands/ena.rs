use anyhow::Result;
use coloc_core::ena::{
    accumulate_connections, code_pairs, compare_projection, group_networks, means_rotation, sphere_normalize,
    ConnectionVector, EnaSpace, GroupNetworks, ProjectionComparison,
};
use coloc_core::Level;
use rayon::prelude::*;
use serde::Serialize;

use super::load_units;
use crate::io::write_atomic;
use crate::report::RunReport;
use crate::svg;
use crate::EnaArgs;

#[derive(Serialize)]
struct UnitVectors {
    unit_id: String,
    level: Level,
    raw: Vec<f64>,
    normalized: Vec<f64>,
}

#[derive(Serialize)]
struct EnaResults {
    codes: Vec<String>,
    /// Code index pairs in the order of every connection vector.
    pairs: Vec<(usize, usize)>,
    window: usize,
    units: Vec<UnitVectors>,
    space: EnaSpace,
    comparisons: Vec<ProjectionComparison>,
    networks: GroupNetworks,
}

pub fn run(args: &EnaArgs) -> Result<()> {
    let mut report = RunReport::new("ena", args)?;
    let units = load_units(&args.input, &mut report)?;

    let raw = units
        .timelines
        .par_iter()
        .map(|t| accumulate_connections(t, args.window))
        .collect::<coloc_core::Result<Vec<ConnectionVector>>>()?;
    let mut normalized = Vec::with_capacity(raw.len());
    for v in &raw {
        let (n, zero) = sphere_normalize(v);
        if zero {
            report.warn(format!("unit '{}' has no co-occurrences; its vector stays at zero", v.unit_id));
        }
        normalized.push(n);
    }

    let space = means_rotation(&normalized, &units.levels, args.residual_dims)?;
    let comparisons = (0..space.axes.len())
        .map(|d| compare_projection(&space, d))
        .collect::<coloc_core::Result<Vec<_>>>()?;
    let networks = group_networks(&normalized, &units.levels, &units.codes)?;

    if let Some(p) = &args.svg {
        let doc = svg::network_svg(&[&networks.high, &networks.low, &networks.difference]);
        write_atomic(p, doc.as_bytes())?;
    }

    let results = EnaResults {
        pairs: code_pairs(units.codes.len()),
        codes: units.codes,
        window: args.window,
        units: raw
            .iter()
            .zip(&normalized)
            .zip(&units.levels)
            .map(|((r, n), &level)| UnitVectors {
                unit_id: r.unit_id.clone(),
                level,
                raw: r.values.clone(),
                normalized: n.values.clone(),
            })
            .collect(),
        space,
        comparisons,
        networks,
    };
    report.results(results)?.write(&args.out)
}
