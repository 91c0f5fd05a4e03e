//! Phonon mode file reader.
//!
//! ```text
//! # header gives the atom and mode counts
//! atoms 2
//! modes 1
//! # each mode: "mode <index> <frequency_meV>" then one 3-vector per atom,
//! # the mass-weighted eigenvector rows (orthonormal across modes)
//! mode 1 50.0
//! 0.70710678 0.0 0.0
//! -0.70710678 0.0 0.0
//! ```
//!
//! Mode indices are 1-based and must appear in order. The atom count must
//! match the reference structure the modes belong to.

use super::{content_lines, parse_finite, IngestError};
use crate::model::{AtomicStructure, PhononModeSet};

fn expect_keyword_count(
    entry: Option<&(usize, &str)>,
    keyword: &str,
) -> Result<(usize, usize), IngestError> {
    let (line_no, raw) = entry.ok_or(IngestError::Parse {
        line: 0,
        msg: format!("missing '{keyword} <count>' header"),
    })?;
    let fields: Vec<&str> = raw.split_whitespace().collect();
    if fields.len() != 2 || fields[0] != keyword {
        return Err(IngestError::Parse {
            line: *line_no,
            msg: format!("expected '{keyword} <count>', found '{}'", raw.trim()),
        });
    }
    let n: usize = fields[1].parse().map_err(|_| IngestError::Parse {
        line: *line_no,
        msg: format!("cannot parse count from '{}'", fields[1]),
    })?;
    Ok((*line_no, n))
}

/// Parses a phonon mode file and validates it against the structure the modes
/// describe (atom count, orthonormality, non-negative frequencies).
pub fn parse_phonons(
    text: &str,
    reference: &AtomicStructure,
) -> Result<PhononModeSet, IngestError> {
    let lines = content_lines(text);
    let mut cursor = 0usize;

    let (atoms_line, n_atoms) = expect_keyword_count(lines.first(), "atoms")?;
    cursor += 1;
    if n_atoms != reference.len() {
        return Err(IngestError::Parse {
            line: atoms_line,
            msg: format!(
                "file declares {n_atoms} atoms but the reference structure has {}",
                reference.len()
            ),
        });
    }
    let (modes_line, n_modes) = expect_keyword_count(lines.get(cursor), "modes")?;
    cursor += 1;
    if n_modes == 0 || n_modes > 3 * n_atoms {
        return Err(IngestError::Parse {
            line: modes_line,
            msg: format!("mode count must be between 1 and 3N = {}", 3 * n_atoms),
        });
    }

    let mut frequencies = Vec::with_capacity(n_modes);
    let mut eigenvectors = Vec::with_capacity(n_modes);
    for k in 1..=n_modes {
        let (line_no, raw) = lines.get(cursor).ok_or(IngestError::Parse {
            line: lines.last().map_or(0, |(n, _)| *n),
            msg: format!("missing header for mode {k}"),
        })?;
        cursor += 1;
        let fields: Vec<&str> = raw.split_whitespace().collect();
        if fields.len() != 3 || fields[0] != "mode" {
            return Err(IngestError::Parse {
                line: *line_no,
                msg: format!("expected 'mode {k} <freq_meV>', found '{}'", raw.trim()),
            });
        }
        let idx: usize = fields[1].parse().map_err(|_| IngestError::Parse {
            line: *line_no,
            msg: format!("cannot parse mode index from '{}'", fields[1]),
        })?;
        if idx != k {
            return Err(IngestError::Parse {
                line: *line_no,
                msg: format!("mode index {idx} out of order, expected {k}"),
            });
        }
        frequencies.push(parse_finite(fields[2], *line_no, "frequency")?);

        let mut e = Vec::with_capacity(3 * n_atoms);
        for _ in 0..n_atoms {
            let (row_line, row_raw) = lines.get(cursor).ok_or(IngestError::Parse {
                line: lines.last().map_or(0, |(n, _)| *n),
                msg: format!("mode {k} is missing eigenvector rows"),
            })?;
            cursor += 1;
            let comps: Vec<&str> = row_raw.split_whitespace().collect();
            if comps.len() != 3 {
                return Err(IngestError::Parse {
                    line: *row_line,
                    msg: format!("eigenvector row needs 3 components, found {}", comps.len()),
                });
            }
            for c in comps {
                e.push(parse_finite(c, *row_line, "eigenvector component")?);
            }
        }
        eigenvectors.push(e);
    }
    if cursor != lines.len() {
        let (line_no, _) = lines[cursor];
        return Err(IngestError::Parse {
            line: line_no,
            msg: "unexpected content after the last declared mode".into(),
        });
    }

    Ok(PhononModeSet::new(
        frequencies,
        eigenvectors,
        reference.clone(),
    )?)
}
