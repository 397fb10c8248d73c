//! Report serialization: a flat CSV of per-case and mean rows, and a
//! JSON summary with the pooled means. Both files are written atomically
//! (temp file in the target directory, then rename) so a crash mid-write
//! never leaves a truncated report behind.

use super::experiments::{ExperimentReport, ReportRow, Summary};
use super::EvalError;
use std::io::Write;
use std::path::Path;

pub const CSV_HEADER: [&str; 8] =
    ["case_id", "scenario", "method", "budget", "seed", "metric", "k", "value"];

/// Render the rows as CSV text. Split out from the file writer so tests
/// (and resume logic) can compare reports byte for byte.
pub fn render_csv(rows: &[ReportRow]) -> Result<String, EvalError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let io_err = |e: csv::Error| EvalError::Input(format!("csv encoding failed: {e}"));
    writer.write_record(CSV_HEADER).map_err(io_err)?;
    for row in rows {
        writer
            .write_record([
                row.case_id.as_str(),
                row.scenario.as_str(),
                row.method.as_str(),
                &row.budget.map(|b| b.to_string()).unwrap_or_default(),
                &row.seed.to_string(),
                row.metric.as_str(),
                &row.k.map(|k| k.to_string()).unwrap_or_default(),
                &format!("{:.6}", row.value),
            ])
            .map_err(io_err)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| EvalError::Input(format!("csv encoding failed: {e}")))?;
    String::from_utf8(bytes).map_err(|e| EvalError::Input(format!("csv not utf-8: {e}")))
}

pub fn render_json(summary: &Summary) -> Result<String, EvalError> {
    let mut text = serde_json::to_string_pretty(summary)
        .map_err(|e| EvalError::Input(format!("summary serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

fn write_atomic(path: &Path, contents: &str) -> Result<(), EvalError> {
    let io_err = |msg: String| EvalError::Io { path: path.display().to_string(), msg };
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => std::path::PathBuf::from("."),
    };
    std::fs::create_dir_all(&parent).map_err(|e| io_err(e.to_string()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&parent).map_err(|e| io_err(e.to_string()))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| io_err(e.to_string()))?;
    tmp.flush().map_err(|e| io_err(e.to_string()))?;
    tmp.persist(path).map_err(|e| io_err(e.to_string()))?;
    Ok(())
}

pub fn write_csv(path: &Path, rows: &[ReportRow]) -> Result<(), EvalError> {
    write_atomic(path, &render_csv(rows)?)
}

pub fn write_json_summary(path: &Path, summary: &Summary) -> Result<(), EvalError> {
    write_atomic(path, &render_json(summary)?)
}

/// Write `{stem}.csv` and `{stem}_summary.json` next to each other.
pub fn write_report(report: &ExperimentReport, csv_path: &Path) -> Result<(), EvalError> {
    write_csv(csv_path, &report.rows)?;
    let json_path = summary_path_for(csv_path);
    write_json_summary(&json_path, &report.summary)
}

pub fn summary_path_for(csv_path: &Path) -> std::path::PathBuf {
    let stem = csv_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".into());
    csv_path.with_file_name(format!("{stem}_summary.json"))
}
