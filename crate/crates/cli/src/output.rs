//! Rendering and atomic file output.

use std::io::Write;
use std::path::{Path, PathBuf};

use gcenter_core::{Error, Result};
use serde_json::Value;

/// Version of the JSON emitted on stdout with `--json`.
pub const OUTPUT_SCHEMA_VERSION: u32 = 1;

/// Result of one subcommand before anything is written.
#[derive(Debug, Default)]
pub struct Outcome {
    pub text: String,
    pub json: Value,
    pub files: Vec<PendingFile>,
    /// The command ran but a reported check failed.
    pub failed: bool,
}

#[derive(Debug)]
pub struct PendingFile {
    pub path: PathBuf,
    pub bytes: Vec<u8>,
}

pub fn envelope(command: &str, result: Value) -> String {
    let doc = serde_json::json!({
        "schema_version": OUTPUT_SCHEMA_VERSION,
        "command": command,
        "result": result,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("JSON values always serialize");
    s.push('\n');
    s
}

pub fn resolve(out_dir: Option<&Path>, path: &Path) -> PathBuf {
    match out_dir {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.to_path_buf(),
    }
}

/// Writes every file through a temporary sibling and renames it into place
/// only after all temporaries were written.
pub fn write_all(files: &[PendingFile]) -> Result<()> {
    let mut staged = Vec::with_capacity(files.len());
    for f in files {
        let dir = match f.path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        std::fs::create_dir_all(&dir).map_err(|e| io_error(&dir, e))?;
        let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| io_error(&dir, e))?;
        tmp.write_all(&f.bytes).and_then(|_| tmp.flush()).map_err(|e| io_error(&f.path, e))?;
        staged.push((tmp, &f.path));
    }
    for (tmp, path) in staged {
        tmp.persist(path).map_err(|e| io_error(path, e.error))?;
    }
    Ok(())
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::compute(format!("cannot write {}: {e}", path.display()))
}

/// RFC 4180 CSV with a header row.
pub fn csv_bytes(headers: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    let fail = |e: csv::Error| Error::compute(format!("CSV encoding failed: {e}"));
    w.write_record(headers).map_err(fail)?;
    for r in rows {
        w.write_record(r).map_err(fail)?;
    }
    w.into_inner().map_err(|e| Error::compute(format!("CSV encoding failed: {e}")))
}

/// Left-aligned first column, right-aligned numbers.
pub fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: &mut dyn Iterator<Item = &str>| {
        let mut s = String::new();
        for (i, c) in cells.enumerate() {
            if i == 0 {
                s.push_str(&format!("{c:<w$}", w = widths[0]));
            } else {
                s.push_str(&format!("  {c:>w$}", w = widths[i]));
            }
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(&mut headers.iter().copied());
    for r in rows {
        out.push_str(&line(&mut r.iter().map(String::as_str)));
    }
    out
}

/// Shortest round-trip representation, used in CSV cells.
pub fn num(v: f64) -> String {
    format!("{v}")
}

pub fn fixed(v: f64, digits: usize) -> String {
    let s = format!("{v:.digits$}");
    // Values that round to zero print without a sign.
    match s.strip_prefix('-') {
        Some(rest) if rest.chars().all(|c| c == '0' || c == '.') => rest.to_string(),
        _ => s,
    }
}

pub fn sci(v: f64) -> String {
    format!("{v:.6e}")
}
