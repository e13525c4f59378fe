use anyhow::Result;
use coloc_core::dtw::{
    group_contrast, resample, select_length, ChannelSeries, DbaOptions, DtwOptions, GlobalScaler, GroupContrast,
    LengthSelectionReport, SelectionOptions,
};
use serde::Serialize;

use super::load_units;
use crate::io::write_atomic;
use crate::report::RunReport;
use crate::svg;
use crate::DtwArgs;

#[derive(Serialize)]
struct DtwResults {
    channels: Vec<String>,
    units: Vec<String>,
    scaler: GlobalScaler,
    selection: LengthSelectionReport,
    contrast: GroupContrast,
}

fn channel_major(values: &[f64], channels: usize) -> Vec<Vec<f64>> {
    (0..channels).map(|c| values.iter().skip(c).step_by(channels).copied().collect()).collect()
}

pub fn run(args: &DtwArgs) -> Result<()> {
    let mut report = RunReport::new("dtw", args)?;
    let units = load_units(&args.input, &mut report)?;
    let series = units
        .timelines
        .iter()
        .map(ChannelSeries::from_timeline)
        .collect::<coloc_core::Result<Vec<_>>>()?;
    let scaler = GlobalScaler::fit(&series)?;
    for c in scaler.flagged_channels() {
        report.warn(format!("channel '{c}' has zero variance across sessions; centred only"));
    }
    let scaled = series.iter().map(|s| scaler.apply(s)).collect::<coloc_core::Result<Vec<_>>>()?;

    let opts = SelectionOptions {
        bootstrap: args.boot,
        sign_threshold: args.sign_threshold,
        seed: args.seed,
        dtw: DtwOptions {
            band_fraction: args.band,
            dba: DbaOptions {
                max_iter: args.max_iter,
                ..DbaOptions::default()
            },
        },
    };
    let selection = select_length(&scaled, &units.levels, &args.lengths, &opts)?;
    let resampled = scaled
        .iter()
        .map(|s| resample(s, selection.chosen_length))
        .collect::<coloc_core::Result<Vec<_>>>()?;
    let contrast = group_contrast(&resampled, &units.levels, selection.chosen_length, &opts.dtw)?;
    for p in [&contrast.high, &contrast.low] {
        if !p.converged {
            report.warn(format!("{} barycenter stopped at the iteration limit ({})", p.group, p.iterations));
        }
    }

    if let Some(path) = &args.svg {
        let d = units.codes.len();
        let doc = svg::heatmap_triptych(
            &channel_major(&contrast.high.values, d),
            &channel_major(&contrast.low.values, d),
            &channel_major(&contrast.difference.values, d),
            &units.codes,
        );
        write_atomic(path, doc.as_bytes())?;
    }

    let results = DtwResults {
        channels: units.codes,
        units: units.timelines.iter().map(|t| t.unit_id().to_string()).collect(),
        scaler,
        selection,
        contrast,
    };
    report.results(results)?.write(&args.out)
}
