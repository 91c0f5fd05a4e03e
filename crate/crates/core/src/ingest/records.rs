//! Charge-state record CSV reader.
//!
//! ```text
//! # one row per charge state of the same defect
//! label,q,e_tot_eV,e_corr_eV
//! XV:+1,1,-100.4,0.05
//! XV:0,0,-100.0,0.0
//! XV:-1,-1,-99.0,0.05
//! ```
//!
//! Header is mandatory; the trailing `e_corr_eV` column is optional and
//! defaults to zero. Charges must be distinct integers.

use super::{content_lines, parse_finite, IngestError};
use crate::model::ChargeStateRecord;

/// Parses the charge-state CSV. Returns records in file order.
pub fn parse_charge_records(text: &str) -> Result<Vec<ChargeStateRecord>, IngestError> {
    let lines = content_lines(text);
    let (header_no, header_raw) = *lines.first().ok_or(IngestError::EmptyTable)?;
    let header: Vec<&str> = header_raw.split(',').map(str::trim).collect();
    let with_corr = match header.as_slice() {
        ["label", "q", "e_tot_eV"] => false,
        ["label", "q", "e_tot_eV", "e_corr_eV"] => true,
        _ => {
            return Err(IngestError::Parse {
                line: header_no,
                msg: format!(
                    "header must be 'label,q,e_tot_eV[,e_corr_eV]', found '{}'",
                    header_raw.trim()
                ),
            })
        }
    };
    let expected = header.len();

    let mut out: Vec<ChargeStateRecord> = Vec::new();
    for (line_no, raw) in &lines[1..] {
        let fields: Vec<&str> = raw.split(',').map(str::trim).collect();
        if fields.len() != expected {
            return Err(IngestError::Parse {
                line: *line_no,
                msg: format!("row has {} fields, expected {}", fields.len(), expected),
            });
        }
        let label = fields[0].to_string();
        if label.is_empty() {
            return Err(IngestError::Parse {
                line: *line_no,
                msg: "empty label".into(),
            });
        }
        let q: i32 = fields[1].parse().map_err(|_| IngestError::Parse {
            line: *line_no,
            msg: format!("cannot parse integer charge from '{}'", fields[1]),
        })?;
        if out.iter().any(|r| r.q == q) {
            return Err(IngestError::DuplicateCharge(q));
        }
        let e_tot = parse_finite(fields[2], *line_no, "total energy")?;
        let e_corr = if with_corr {
            parse_finite(fields[3], *line_no, "correction energy")?
        } else {
            0.0
        };
        out.push(ChargeStateRecord::new(label, q, e_tot, e_corr));
    }
    if out.is_empty() {
        return Err(IngestError::EmptyTable);
    }
    Ok(out)
}
