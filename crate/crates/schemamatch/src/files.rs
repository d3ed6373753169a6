//! Reading schema, mapping and transcript files; writing mappings, reports
//! and CSV tables.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use schemamatch_core::diag::Warnings;
use schemamatch_core::schema::{load_ground_truth, load_schema, mapping_to_json, MatchSet, Schema};

use crate::AppError;

pub fn read_text(path: &Path) -> Result<String, AppError> {
    fs::read_to_string(path).map_err(|e| AppError::input(path, e))
}

fn located(path: &Path, e: schemamatch_core::Error) -> AppError {
    use schemamatch_core::Error;
    let at = |m: String| format!("{}: {m}", path.display());
    AppError::Engine(match e {
        Error::Parse(m) => Error::Parse(at(m)),
        Error::Resolution(m) => Error::Resolution(at(m)),
        other => other,
    })
}

pub fn load_schema_file(path: &Path, warnings: &mut Warnings) -> Result<Schema, AppError> {
    load_schema(&read_text(path)?, warnings).map_err(|e| located(path, e))
}

pub fn load_mapping_file(
    path: &Path,
    source: &Schema,
    target: &Schema,
    warnings: &mut Warnings,
) -> Result<MatchSet, AppError> {
    load_ground_truth(&read_text(path)?, source, target, warnings).map_err(|e| located(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), AppError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| AppError::output(dir, e))?;
    }
    fs::write(path, text).map_err(|e| AppError::output(path, e))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), AppError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| AppError::output(path, e))?;
    text.push('\n');
    write_text(path, &text)
}

pub fn write_mapping(path: &Path, set: &MatchSet) -> Result<(), AppError> {
    write_text(path, &(mapping_to_json(set) + "\n"))
}

/// `out.mapping.json` gets `out.report.json`; any other name gets
/// `.report.json` appended to its stem.
pub fn report_path(mapping: &Path) -> PathBuf {
    let name = mapping.file_name().and_then(|n| n.to_str()).unwrap_or("match");
    let stem = name
        .strip_suffix(".mapping.json")
        .or_else(|| name.strip_suffix(".json"))
        .unwrap_or(name);
    mapping.with_file_name(format!("{stem}.report.json"))
}

pub fn csv_string<I>(header: &[&str], rows: I) -> Result<String, csv::Error>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
}

pub fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<(), AppError>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let text = csv_string(header, rows).map_err(|e| AppError::output(path, e))?;
    write_text(path, &text)
}
