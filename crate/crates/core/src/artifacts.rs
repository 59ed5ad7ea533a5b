//! On-disk formats: JSON artifacts (scenes, scenarios, profiles, history,
//! overhead, plans, summaries) and the CSV tables for per-frame results and
//! sweep reports.
//!
//! Everything here is byte-stable: floats are written in shortest
//! round-trip form by `serde_json`/`csv`, map-like content uses ordered
//! containers, and JSON files end in exactly one trailing newline — so
//! identical inputs always produce identical files.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distribution::{HistoryObject, ObjectHistory};
use crate::profile::{ModelFamily, SizeBinning};
use crate::runtime::{FrameResult, OverheadEstimate, SequenceMetrics};

#[derive(Debug, Error)]
pub enum ArtifactError {
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("bad JSON in {path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("bad CSV in {path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ArtifactError + '_ {
    move |source| ArtifactError::Io { path: path.to_path_buf(), source }
}

/// Writes any serializable value as pretty JSON (with a trailing newline),
/// creating parent directories as needed.
pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<(), ArtifactError> {
    let path = path.as_ref();
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err(path))?;
    }
    let mut body = serde_json::to_string_pretty(value)
        .map_err(|source| ArtifactError::Json { path: path.to_path_buf(), source })?;
    body.push('\n');
    fs::write(path, body).map_err(io_err(path))
}

/// Reads a JSON artifact back.
pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T, ArtifactError> {
    let path = path.as_ref();
    let body = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&body)
        .map_err(|source| ArtifactError::Json { path: path.to_path_buf(), source })
}

/// The machine-readable error envelope printed on a failing CLI exit.
pub fn error_json(error: &str, message: &str) -> String {
    serde_json::json!({ "error": error, "message": message }).to_string()
}

// ---------------------------------------------------------------------------
// Per-frame results CSV
// ---------------------------------------------------------------------------

/// One row of the per-frame results table. The column set and order are part
/// of the format: `frame_id, plan_source, est_accuracy, est_latency_ms,
/// sim_latency_ms, slo_missed, score`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub frame_id: u64,
    pub plan_source: String,
    pub est_accuracy: f64,
    pub est_latency_ms: f64,
    pub sim_latency_ms: f64,
    pub slo_missed: bool,
    pub score: f64,
}

impl From<&FrameResult> for ResultRow {
    fn from(r: &FrameResult) -> Self {
        Self {
            frame_id: r.frame_id,
            plan_source: r.plan_source.to_string(),
            est_accuracy: r.plan.estimated_accuracy,
            est_latency_ms: r.plan.estimated_latency_ms,
            sim_latency_ms: r.sim_latency_ms,
            slo_missed: r.slo_missed,
            score: r.score,
        }
    }
}

/// Column order of the per-frame results table.
pub const RESULT_COLUMNS: [&str; 7] = [
    "frame_id",
    "plan_source",
    "est_accuracy",
    "est_latency_ms",
    "sim_latency_ms",
    "slo_missed",
    "score",
];

/// Writes the per-frame results table; an empty run writes just the header.
pub fn write_results_csv(
    path: impl AsRef<Path>,
    results: &[FrameResult],
) -> Result<(), ArtifactError> {
    write_csv_rows(path.as_ref(), &RESULT_COLUMNS, results.iter().map(ResultRow::from))
}

pub fn read_results_csv(path: impl AsRef<Path>) -> Result<Vec<ResultRow>, ArtifactError> {
    read_csv_rows(path.as_ref())
}

// ---------------------------------------------------------------------------
// Sweep report CSV
// ---------------------------------------------------------------------------

/// One aggregated report line: a (objective, mode, strategy) point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub slo_ms: f64,
    pub mode: String,
    pub strategy: String,
    pub mean_score: f64,
    pub miss_rate_pct: f64,
    pub mean_latency_ms: f64,
}

/// Column order of the report table.
pub const REPORT_COLUMNS: [&str; 6] =
    ["slo_ms", "mode", "strategy", "mean_score", "miss_rate_pct", "mean_latency_ms"];

pub fn write_report_csv(path: impl AsRef<Path>, rows: &[ReportRow]) -> Result<(), ArtifactError> {
    write_csv_rows(path.as_ref(), &REPORT_COLUMNS, rows.iter().cloned())
}

pub fn read_report_csv(path: impl AsRef<Path>) -> Result<Vec<ReportRow>, ArtifactError> {
    read_csv_rows(path.as_ref())
}

fn write_csv_rows<T: Serialize>(
    path: &Path,
    header: &[&str],
    rows: impl Iterator<Item = T>,
) -> Result<(), ArtifactError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err(path))?;
    }
    let file = fs::File::create(path).map_err(io_err(path))?;
    // The header is written explicitly (so empty tables still carry it) and
    // automatic headers are off to avoid writing it twice.
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    let csv_err = |source| ArtifactError::Csv { path: path.to_path_buf(), source };
    writer.write_record(header).map_err(csv_err)?;
    for row in rows {
        writer.serialize(row).map_err(csv_err)?;
    }
    writer
        .into_inner()
        .map_err(|e| ArtifactError::Io { path: path.to_path_buf(), source: e.into_error() })?
        .flush()
        .map_err(io_err(path))
}

fn read_csv_rows<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, ArtifactError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    let mut reader = csv::Reader::from_reader(file);
    reader
        .deserialize()
        .collect::<Result<Vec<T>, csv::Error>>()
        .map_err(|source| ArtifactError::Csv { path: path.to_path_buf(), source })
}

// ---------------------------------------------------------------------------
// JSON artifact schemas
// ---------------------------------------------------------------------------

/// One box in the on-disk history format.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoryBoxRecord {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
    pub class_id: u32,
}

/// One frame's worth of remembered boxes, as stored in `history.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryFrameRecord {
    pub frame_id: u64,
    pub boxes: Vec<HistoryBoxRecord>,
}

/// Groups a history by source frame for the on-disk format. Single-class
/// worlds carry `class_id` 0.
pub fn history_to_records(history: &ObjectHistory) -> Vec<HistoryFrameRecord> {
    let mut by_frame: BTreeMap<u64, Vec<HistoryBoxRecord>> = BTreeMap::new();
    for o in &history.objects {
        by_frame.entry(o.source_frame_id).or_default().push(HistoryBoxRecord {
            x_min: o.bbox.x_min,
            y_min: o.bbox.y_min,
            x_max: o.bbox.x_max,
            y_max: o.bbox.y_max,
            class_id: 0,
        });
    }
    by_frame
        .into_iter()
        .map(|(frame_id, boxes)| HistoryFrameRecord { frame_id, boxes })
        .collect()
}

/// Rebuilds the in-memory history from its on-disk form.
pub fn history_from_records(records: &[HistoryFrameRecord]) -> ObjectHistory {
    let objects = records
        .iter()
        .flat_map(|rec| {
            rec.boxes.iter().map(move |b| HistoryObject {
                bbox: crate::geometry::BBox::new(b.x_min, b.y_min, b.x_max, b.y_max),
                source_frame_id: rec.frame_id,
            })
        })
        .collect();
    ObjectHistory::new(objects)
}

/// `profiles.json`: the measured model family and the binning it was
/// measured under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfilesFile {
    pub binning: SizeBinning,
    pub models: ModelFamily,
}

/// `overhead.json`: the planning allowance and whether it already exceeds
/// the objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverheadFile {
    pub p99_ms: f64,
    pub overhead_ms: f64,
    pub degenerate: bool,
}

impl OverheadFile {
    pub fn new(estimate: &OverheadEstimate, degenerate: bool) -> Self {
        Self { p99_ms: estimate.p99_ms, overhead_ms: estimate.overhead_ms, degenerate }
    }

    pub fn estimate(&self) -> OverheadEstimate {
        OverheadEstimate { p99_ms: self.p99_ms, overhead_ms: self.overhead_ms }
    }
}

/// `summary.json` for one simulated sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub slo_ms: f64,
    pub mode: String,
    pub strategy: String,
    pub seed: u64,
    /// True when the overhead allowance alone already exhausts the objective,
    /// so the run could only ever execute fallback plans.
    pub degenerate: bool,
    #[serde(flatten)]
    pub metrics: SequenceMetrics,
}
