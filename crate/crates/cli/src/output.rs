//! Output files: CSV (canonical) or JSON Lines; either way the first line is
//! the reproduction comment `# eville <version> seed=<seed>`.

use std::io::Write;
use std::path::Path;

use crate::config::OutputFormat;
use crate::error::CliError;

#[derive(Debug, Clone)]
pub enum Cell {
    Str(String),
    F64(f64),
    U64(u64),
    U128(u128),
    Bool(bool),
    /// Empty CSV cell / JSON null.
    Missing,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Str(s) => {
                if s.contains(',') || s.contains('"') {
                    format!("\"{}\"", s.replace('"', "\"\""))
                } else {
                    s.clone()
                }
            }
            Cell::F64(v) => fmt_f64(*v),
            Cell::U64(v) => v.to_string(),
            Cell::U128(v) => v.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Str(s) => serde_json::Value::String(s.clone()),
            Cell::F64(v) => serde_json::Number::from_f64(*v)
                .map_or(serde_json::Value::Null, serde_json::Value::Number),
            Cell::U64(v) => serde_json::Value::from(*v),
            Cell::U128(v) => serde_json::Value::String(v.to_string()),
            Cell::Bool(b) => serde_json::Value::Bool(*b),
            Cell::Missing => serde_json::Value::Null,
        }
    }
}

/// Shortest-round-trip decimal, switching to scientific notation outside
/// [1e-4, 1e15) so tiny error bounds stay readable.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        return "0".to_owned();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let a = v.abs();
    if (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Writes exactly one output file.
pub fn write_rows(
    path: &Path,
    format: OutputFormat,
    seed: u64,
    header: &[&str],
    rows: &[Vec<Cell>],
) -> Result<(), CliError> {
    let mut text = format!("# eville {} seed={seed}\n", env!("CARGO_PKG_VERSION"));
    match format {
        OutputFormat::Csv => {
            text.push_str(&header.join(","));
            text.push('\n');
            for row in rows {
                debug_assert_eq!(row.len(), header.len());
                let line: Vec<String> = row.iter().map(Cell::csv).collect();
                text.push_str(&line.join(","));
                text.push('\n');
            }
        }
        OutputFormat::Jsonl => {
            for row in rows {
                let obj: serde_json::Map<String, serde_json::Value> = header
                    .iter()
                    .zip(row)
                    .map(|(k, c)| ((*k).to_owned(), c.json()))
                    .collect();
                text.push_str(&serde_json::Value::Object(obj).to_string());
                text.push('\n');
            }
        }
    }
    let mut file = std::fs::File::create(path)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
    file.write_all(text.as_bytes())
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}
