use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use coloc_core::config::StudyConfig;
use coloc_core::log::parse_detection_log;
use coloc_core::{ActionTaxonomy, FrameRecord, TimelineMatrix};

/// Writes `bytes` to a sibling temp file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).with_context(|| format!("cannot create directory {}", dir.display()))?;
    let name = path
        .file_name()
        .with_context(|| format!("output path {} has no file name", path.display()))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let mut f = fs::File::create(&tmp).with_context(|| format!("cannot write {}", tmp.display()))?;
    f.write_all(bytes)?;
    f.sync_all()?;
    drop(f);
    fs::rename(&tmp, path).with_context(|| format!("cannot move output into {}", path.display()))?;
    Ok(())
}

pub fn require_file(path: &Path) -> Result<()> {
    if !path.is_file() {
        bail!("input file not found: {}", path.display());
    }
    Ok(())
}

pub fn read_config(path: &Path) -> Result<StudyConfig> {
    require_file(path)?;
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    StudyConfig::from_json(&text).with_context(|| format!("invalid configuration {}", path.display()))
}

pub fn read_optional_config(path: Option<&Path>) -> Result<StudyConfig> {
    path.map_or_else(|| Ok(StudyConfig::default()), read_config)
}

pub fn read_log(path: &Path, taxonomy: &ActionTaxonomy) -> Result<Vec<FrameRecord>> {
    require_file(path)?;
    let f = fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    parse_detection_log(BufReader::new(f), taxonomy).with_context(|| format!("invalid detection log {}", path.display()))
}

/// Every `*.csv` timeline in `dir`, sorted by file name; the unit id is the file stem.
pub fn read_timelines(dir: &Path) -> Result<Vec<TimelineMatrix>> {
    if !dir.is_dir() {
        bail!("timeline directory not found: {}", dir.display());
    }
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("cannot list {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        bail!("no timeline CSV files in {}", dir.display());
    }
    paths
        .iter()
        .map(|p| {
            let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let f = fs::File::open(p).with_context(|| format!("cannot open {}", p.display()))?;
            TimelineMatrix::read_csv(stem, BufReader::new(f)).with_context(|| format!("invalid timeline {}", p.display()))
        })
        .collect()
}

/// `path` with its extension replaced by `.json`, or `.report.json` when it already is JSON.
pub fn sidecar_report(path: &Path) -> PathBuf {
    if path.extension().is_some_and(|e| e == "json") {
        path.with_extension("report.json")
    } else {
        path.with_extension("json")
    }
}

pub fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(w.into_inner()?)
}

pub fn fmt_opt(v: Option<f64>, decimals: usize) -> String {
    v.map(|x| format!("{x:.decimals$}")).unwrap_or_default()
}

pub fn fmt(v: f64) -> String {
    format!("{v:.6}")
}
