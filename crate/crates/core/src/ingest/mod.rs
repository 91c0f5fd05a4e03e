//! Parsers and writers for every on-disk format the toolkit touches.
//!
//! All text formats share two lexical rules: blank lines are skipped, and
//! lines whose first non-whitespace character is `#` are comments. Parsing is
//! strict beyond that; unknown keys, ragged rows, and non-finite numbers are
//! errors rather than warnings, so typos surface at the boundary instead of
//! as silently wrong spectra.

mod config;
mod elements;
mod phonons;
mod records;
mod structure;
mod table;

pub use config::{
    parse_config, ChargeSection, HostSection, JtSection, LineshapeSection, PipelineConfig,
};
pub use elements::mass_of;
pub use phonons::parse_phonons;
pub use records::parse_charge_records;
pub use structure::{parse_structure, serialize_structure};
pub use table::{read_table, write_table};

use crate::model::ModelError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: unknown element symbol '{symbol}'")]
    UnknownElement { line: usize, symbol: String },
    #[error("header declares {declared} atoms but body has {found}")]
    CountMismatch { declared: usize, found: usize },
    #[error("duplicate charge state q = {0}")]
    DuplicateCharge(i32),
    #[error("table has no data rows")]
    EmptyTable,
    #[error("data row {row} has {got} columns, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("data row {row}, column {col}: value is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Lines that carry content, paired with their 1-based line numbers.
/// Blank lines and `#` comments are dropped; numbering still counts them so
/// error messages point at the real file location.
fn content_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                None
            } else {
                Some((i + 1, raw))
            }
        })
        .collect()
}

/// Strict float parse: rejects NaN and infinities along with garbage text.
fn parse_finite(field: &str, line: usize, what: &str) -> Result<f64, IngestError> {
    let v: f64 = field.trim().parse().map_err(|_| IngestError::Parse {
        line,
        msg: format!("cannot parse {what} from '{field}'"),
    })?;
    if !v.is_finite() {
        return Err(IngestError::Parse {
            line,
            msg: format!("{what} is not finite: '{field}'"),
        });
    }
    Ok(v)
}
