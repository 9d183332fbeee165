//! CSV and JSON artifact writers.
//!
//! CSV bodies are deterministic for a fixed config and seed; the only
//! honestly non-reproducible element, the generation timestamp, lives in a
//! single leading comment line so diffs of the body stay clean.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::RunError;

/// Seconds since the epoch, as the timestamp header.
fn timestamp() -> String {
    let now = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("# generated-at-unix {now}")
}

/// Write a CSV file: one timestamp comment line, a header row, then rows.
pub fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl Iterator<Item = Vec<String>>,
) -> Result<(), RunError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "{}", timestamp())?;
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Write a pretty-printed JSON summary.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), RunError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

/// Format an f64 with the shortest round-trip representation.
pub fn fmt(x: f64) -> String {
    format!("{x}")
}
