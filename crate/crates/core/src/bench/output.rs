//! Report files. Every file is written to a temporary name in the target
//! directory and renamed into place, so readers never see partial output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::experiment::ExperimentReport;
use super::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    /// `report.json` plus one trace CSV and one audit CSV per method.
    #[default]
    Csv,
    /// `report.json` with the per-iteration rows embedded.
    Json,
}

pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), BenchError> {
    let io = |source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = path.parent().unwrap_or(Path::new("."));
    let file_name = path.file_name().map(|f| f.to_string_lossy().into_owned());
    let tmp = dir.join(format!(".{}.tmp", file_name.unwrap_or_default()));
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(contents).map_err(io)?;
    f.sync_all().map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

pub fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut text = serde_json::to_vec_pretty(value).expect("report types serialize");
    text.push(b'\n');
    text
}

/// Writes the report (and CSVs for [`Format::Csv`]) into `dir`, returning
/// the paths written in order.
pub fn write_report(
    report: &ExperimentReport,
    dir: &Path,
    format: Format,
) -> Result<Vec<PathBuf>, BenchError> {
    fs::create_dir_all(dir).map_err(|source| BenchError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    if format == Format::Csv {
        for m in &report.methods {
            let Some(trace) = &m.raw else { continue };
            let path = dir.join(format!("{}.trace.csv", m.name));
            write_atomic(&path, trace.to_csv().as_bytes())?;
            written.push(path);
            for a in &m.audits {
                let path = dir.join(format!("{}.{}.audit.csv", m.name, a.constant_name));
                write_atomic(&path, a.to_csv().as_bytes())?;
                written.push(path);
            }
        }
    }
    let path = dir.join("report.json");
    write_atomic(&path, &to_json(report))?;
    written.push(path);
    Ok(written)
}
