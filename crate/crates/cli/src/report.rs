//! Report schema and file emission.
//!
//! A run writes `report-{stamp}.json` plus `{task_id}-{stamp}.csv` for every task that
//! produced curves. Everything outside the `run` block of the report is a function of the
//! config and seed alone.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Bumped whenever a field changes meaning or disappears.
pub const SCHEMA_VERSION: u32 = 1;

/// One CSV row: a sampled value along a radial curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub task: String,
    pub angle: f64,
    pub radius: f64,
    pub tag: String,
    pub value: f64,
    pub error_bar: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskResult {
    pub id: String,
    pub kind: String,
    pub passed: bool,
    /// One line for terminals and logs.
    pub headline: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Kind-specific payload: residual tables, verdicts with their thresholds, curve fits.
    pub details: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryLine {
    pub id: String,
    pub kind: String,
    pub passed: bool,
    pub headline: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub tasks: Vec<SummaryLine>,
    pub passed: usize,
    pub failed: usize,
    pub exit_code: u8,
}

/// Facts about this particular execution rather than its results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub stamp: String,
    pub output_dir: PathBuf,
    pub wall_clock_seconds: f64,
    pub task_seconds: BTreeMap<String, f64>,
    /// Task id to CSV file name.
    pub curve_files: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: String,
    pub tool_version: String,
    /// The effective configuration, seed included.
    pub config: serde_json::Value,
    /// Every symbol available to the run, preset ones included.
    pub symbols: BTreeMap<String, String>,
    pub tasks: Vec<TaskResult>,
    pub summary: Summary,
    pub run: RunInfo,
}

impl Report {
    pub fn summarize(tasks: &[TaskResult]) -> Summary {
        let lines: Vec<SummaryLine> = tasks
            .iter()
            .map(|t| SummaryLine {
                id: t.id.clone(),
                kind: t.kind.clone(),
                passed: t.passed,
                headline: t.headline.clone(),
            })
            .collect();
        let passed = lines.iter().filter(|l| l.passed).count();
        let failed = lines.len() - passed;
        Summary { tasks: lines, passed, failed, exit_code: u8::from(failed > 0) }
    }

    /// Recomputes the summary from the task records.
    pub fn resummarize(&self) -> Summary {
        Self::summarize(&self.tasks)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }
}

/// UTC time formatted for file names.
pub fn timestamp() -> String {
    chrono::Utc::now().format("%Y%m%dT%H%M%SZ").to_string()
}

fn csv_bytes(rows: &[CurveRow]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory csv");
    }
    w.into_inner().expect("in-memory csv")
}

/// Files written by [`emit`].
#[derive(Debug, Clone)]
pub struct Emitted {
    pub report: PathBuf,
    pub curves: BTreeMap<String, PathBuf>,
}

/// Picks a stamp no earlier run in `dir` has used, so files are never overwritten.
pub fn free_stamp(dir: &Path, stamp: &str) -> String {
    let taken = |s: &str| dir.join(format!("report-{s}.json")).exists();
    if !taken(stamp) {
        return stamp.to_string();
    }
    (1..).map(|k| format!("{stamp}-{k}")).find(|s| !taken(s)).expect("unbounded")
}

/// Writes the CSV files and then the report. Files are staged under temporary names and
/// renamed once all of them are written, so a failure leaves nothing behind.
pub fn emit(report: &mut Report, curves: &BTreeMap<String, Vec<CurveRow>>) -> Result<Emitted, CliError> {
    let dir = report.run.output_dir.clone();
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let stamp = report.run.stamp.clone();
    let mut staged: Vec<(PathBuf, PathBuf)> = Vec::new();
    let result = (|| {
        let mut out = Emitted { report: dir.join(format!("report-{stamp}.json")), curves: BTreeMap::new() };
        for (task, rows) in curves {
            if rows.is_empty() {
                continue;
            }
            let name = format!("{task}-{stamp}.csv");
            let path = dir.join(&name);
            staged.push((stage(&path, &csv_bytes(rows))?, path.clone()));
            report.run.curve_files.insert(task.clone(), name);
            out.curves.insert(task.clone(), path);
        }
        let mut json = serde_json::to_vec_pretty(report).expect("report serializes");
        json.push(b'\n');
        staged.push((stage(&out.report, &json)?, out.report.clone()));
        for (tmp, dst) in &staged {
            if dst.exists() {
                return Err(CliError::io(
                    dst,
                    std::io::Error::new(std::io::ErrorKind::AlreadyExists, "refusing to overwrite"),
                ));
            }
            fs::rename(tmp, dst).map_err(|e| CliError::io(dst, e))?;
        }
        Ok(out)
    })();
    if result.is_err() {
        for (tmp, _) in &staged {
            let _ = fs::remove_file(tmp);
        }
    }
    result
}

fn stage(path: &Path, bytes: &[u8]) -> Result<PathBuf, CliError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    let file = File::create(&tmp).map_err(|e| CliError::io(&tmp, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(bytes).and_then(|_| w.flush()).map_err(|e| CliError::io(&tmp, e))?;
    Ok(tmp)
}
