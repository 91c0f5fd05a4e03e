//! Generic numeric CSV emitter and reader used for every computed curve the
//! pipeline writes (scans, spectra, stability intervals).
//!
//! Floats are written with 17 significant digits so a write/read cycle
//! reproduces each value bit for bit; downstream plots never see rounding
//! drift between runs.

use super::{content_lines, IngestError};

/// Renders a header row plus data rows. All rows must match the header width
/// and contain only finite values.
pub fn write_table(headers: &[&str], rows: &[Vec<f64>]) -> Result<String, IngestError> {
    if headers.is_empty() || rows.is_empty() {
        return Err(IngestError::EmptyTable);
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != headers.len() {
            return Err(IngestError::RaggedRow {
                row: i + 1,
                expected: headers.len(),
                got: row.len(),
            });
        }
        for (j, v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(IngestError::NonFinite {
                    row: i + 1,
                    col: j + 1,
                });
            }
        }
    }
    let mut out = String::with_capacity(rows.len() * headers.len() * 26);
    out.push_str(&headers.join(","));
    out.push('\n');
    for row in rows {
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            first = false;
            out.push_str(&format!("{v:.16e}"));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Reads a table produced by [`write_table`] (or any numeric CSV with a text
/// header). Returns the header names and the data rows.
pub fn read_table(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>), IngestError> {
    let lines = content_lines(text);
    let (_, header_raw) = *lines.first().ok_or(IngestError::EmptyTable)?;
    let headers: Vec<String> = header_raw
        .split(',')
        .map(|h| h.trim().to_string())
        .collect();
    let mut rows = Vec::with_capacity(lines.len().saturating_sub(1));
    for (i, (line_no, raw)) in lines[1..].iter().enumerate() {
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != headers.len() {
            return Err(IngestError::RaggedRow {
                row: i + 1,
                expected: headers.len(),
                got: fields.len(),
            });
        }
        let mut row = Vec::with_capacity(fields.len());
        for (j, f) in fields.iter().enumerate() {
            let v: f64 = f.trim().parse().map_err(|_| IngestError::Parse {
                line: *line_no,
                msg: format!("cannot parse number from '{}'", f.trim()),
            })?;
            if !v.is_finite() {
                return Err(IngestError::NonFinite {
                    row: i + 1,
                    col: j + 1,
                });
            }
            row.push(v);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(IngestError::EmptyTable);
    }
    Ok((headers, rows))
}
