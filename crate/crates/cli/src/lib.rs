//! Command-line front-end: argument parsing, dispatch and report plumbing.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

mod commands;
pub mod io;
pub mod report;
pub mod svg;

/// Environment variable read for the worker thread count.
pub const THREADS_ENV: &str = "COLOC_THREADS";

#[derive(Debug, Parser)]
#[command(name = "coloc", version, about = "Analytics for action-detection logs from co-located classrooms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inter-rater agreement between two annotation logs
    Irr(IrrArgs),
    /// Detector evaluation against ground truth: P/R, AP, mAP, confusion
    EvalDet(EvalDetArgs),
    /// Attach the nearest space and spatial code to every detection
    AssignSpaces(AssignArgs),
    /// Per-second binary timelines, one per session
    Timeline(TimelineArgs),
    /// Epistemic network analysis with a means rotation
    Ena(EnaArgs),
    /// DTW-barycenter prototypes and target-length selection
    Dtw(DtwArgs),
    /// Per-code Mann-Whitney tests and PERMANOVA on action profiles
    Stats(StatsArgs),
    /// Frame sampling plan from the handover moment
    SampleFrames(SampleArgs),
    /// Stratified train/validation/test split or k folds of detections
    Split(SplitArgs),
    /// Privacy mask rectangles covering the top of each box
    Mask(MaskArgs),
    /// Merge run reports into one document
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Plain,
    Spatial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DimensionArg {
    Task,
    Collaboration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AdjustArg {
    Holm,
    Bonferroni,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceArg {
    Euclidean,
    Manhattan,
}

#[derive(Debug, Args, Serialize)]
pub struct IrrArgs {
    /// Reference annotator log
    #[arg(long)]
    pub a: PathBuf,
    /// Second annotator log
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    pub iou: f64,
    /// Study configuration (taxonomy); defaults apply when omitted
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Run report path; defaults to the output path with a .json extension
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EvalDetArgs {
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub gt: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Confidence threshold for the operating point and confusion matrix
    #[arg(long, default_value_t = 0.25)]
    pub conf: f64,
    #[arg(long)]
    pub out: PathBuf,
    /// Precision-recall figure
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long)]
    pub confusion_svg: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct AssignArgs {
    #[arg(long)]
    pub log: PathBuf,
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct TimelineArgs {
    #[arg(long)]
    pub log: PathBuf,
    /// Required for spatial mode
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Mode::Plain)]
    pub mode: Mode,
    /// A `.csv` file for a single-session log, otherwise a directory
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct GroupArgs {
    /// Directory of timeline CSV files named `<session_id>.csv`
    #[arg(long)]
    pub timelines: PathBuf,
    /// Study configuration holding the rubrics
    #[arg(long)]
    pub groups: PathBuf,
    #[arg(long, value_enum, default_value_t = DimensionArg::Task)]
    pub dimension: DimensionArg,
}

#[derive(Debug, Args, Serialize)]
pub struct EnaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: GroupArgs,
    #[arg(long, default_value_t = 6)]
    pub window: usize,
    #[arg(long, default_value_t = 1)]
    pub residual_dims: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DtwArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: GroupArgs,
    /// Candidate target lengths
    #[arg(long, value_delimiter = ',', default_value = "100,200,300,500,700")]
    pub lengths: Vec<usize>,
    /// Band radius as a fraction of the target length
    #[arg(long, default_value_t = 0.1)]
    pub band: f64,
    #[arg(long, default_value_t = 200)]
    pub boot: usize,
    #[arg(long, default_value_t = 0.1)]
    pub sign_threshold: f64,
    #[arg(long, default_value_t = 30)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct StatsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: GroupArgs,
    #[arg(long, value_enum, default_value_t = Mode::Plain)]
    pub mode: Mode,
    #[arg(long, default_value_t = 999)]
    pub permutations: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = AdjustArg::Holm)]
    pub adjust: AdjustArg,
    #[arg(long, value_enum, default_value_t = DistanceArg::Euclidean)]
    pub distance: DistanceArg,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SampleArgs {
    /// Study configuration holding the sessions
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value_t = 10.0)]
    pub interval: f64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SplitArgs {
    #[arg(long)]
    pub log: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Train, validation and test ratios
    #[arg(long, value_delimiter = ',', default_value = "0.7,0.2,0.1")]
    pub ratios: Vec<f64>,
    /// Produce k folds instead of a three-way split
    #[arg(long)]
    pub kfold: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct MaskArgs {
    #[arg(long)]
    pub log: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides the configured mask fraction
    #[arg(long)]
    pub fraction: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ReportArgs {
    /// Run reports to merge, in order
    #[arg(long, num_args = 1.., required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = match raw.trim().parse() {
        Ok(n) if n > 0 => n,
        _ => anyhow::bail!("{THREADS_ENV} must be a positive integer, got '{raw}'"),
    };
    // a pool may already exist when dispatch runs more than once in a process
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Runs one command line. Returns 0 on success, 1 when the run fails on its
/// inputs and 2 on a usage error.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match configure_threads().and_then(|()| commands::run(cli.command)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
