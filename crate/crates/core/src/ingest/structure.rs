//! Extended-XYZ reader and writer.
//!
//! ```text
//! # optional comments and blank lines anywhere
//! 2
//! Lattice="3.57 0 0 0 3.57 0 0 0 3.57" Properties=species:S:1:pos:R:3 pbc="T T T"
//! C 0.0000 0.0000 0.0000
//! C 0.8925 0.8925 0.8925
//! ```
//!
//! The count line comes first, then one metadata line of `key=value` pairs
//! (values with spaces are double-quoted), then one line per atom with
//! `symbol x y z` in angstrom. Recognized keys: `Lattice` (required, nine
//! floats, row-major cell vectors), `Masses` (optional per-atom amu override),
//! `Properties` and `pbc` (accepted and ignored). Any other key is an error.
//! Masses default to the standard atomic weight of each symbol.

use super::{content_lines, elements::mass_of, parse_finite, IngestError};
use crate::model::AtomicStructure;

fn split_key_values(line: &str, line_no: usize) -> Result<Vec<(String, String)>, IngestError> {
    let mut out = Vec::new();
    let mut chars = line.chars().peekable();
    loop {
        while matches!(chars.peek(), Some(c) if c.is_whitespace()) {
            chars.next();
        }
        if chars.peek().is_none() {
            break;
        }
        let mut key = String::new();
        while let Some(&c) = chars.peek() {
            if c == '=' || c.is_whitespace() {
                break;
            }
            key.push(c);
            chars.next();
        }
        if chars.peek() != Some(&'=') {
            return Err(IngestError::Parse {
                line: line_no,
                msg: format!("expected '=' after key '{key}'"),
            });
        }
        chars.next();
        let mut val = String::new();
        if chars.peek() == Some(&'"') {
            chars.next();
            let mut closed = false;
            for c in chars.by_ref() {
                if c == '"' {
                    closed = true;
                    break;
                }
                val.push(c);
            }
            if !closed {
                return Err(IngestError::Parse {
                    line: line_no,
                    msg: format!("unterminated quote in value of '{key}'"),
                });
            }
        } else {
            while let Some(&c) = chars.peek() {
                if c.is_whitespace() {
                    break;
                }
                val.push(c);
                chars.next();
            }
        }
        out.push((key, val));
    }
    Ok(out)
}

/// Parses an extended-XYZ document into a validated structure.
pub fn parse_structure(text: &str) -> Result<AtomicStructure, IngestError> {
    let lines = content_lines(text);
    if lines.len() < 2 {
        return Err(IngestError::Parse {
            line: lines.last().map_or(1, |(n, _)| *n),
            msg: "expected a count line and a metadata line".into(),
        });
    }
    let (count_no, count_raw) = lines[0];
    let declared: usize = count_raw.trim().parse().map_err(|_| IngestError::Parse {
        line: count_no,
        msg: format!("cannot parse atom count from '{}'", count_raw.trim()),
    })?;

    let (meta_no, meta_raw) = lines[1];
    let mut lattice: Option<[[f64; 3]; 3]> = None;
    let mut mass_override: Option<Vec<f64>> = None;
    for (key, val) in split_key_values(meta_raw, meta_no)? {
        match key.as_str() {
            "Lattice" => {
                let nums: Vec<f64> = val
                    .split_whitespace()
                    .map(|f| parse_finite(f, meta_no, "lattice component"))
                    .collect::<Result<_, _>>()?;
                if nums.len() != 9 {
                    return Err(IngestError::Parse {
                        line: meta_no,
                        msg: format!("Lattice needs 9 components, found {}", nums.len()),
                    });
                }
                lattice = Some([
                    [nums[0], nums[1], nums[2]],
                    [nums[3], nums[4], nums[5]],
                    [nums[6], nums[7], nums[8]],
                ]);
            }
            "Masses" => {
                let nums: Vec<f64> = val
                    .split_whitespace()
                    .map(|f| parse_finite(f, meta_no, "mass"))
                    .collect::<Result<_, _>>()?;
                mass_override = Some(nums);
            }
            "Properties" | "pbc" => {}
            other => {
                return Err(IngestError::Parse {
                    line: meta_no,
                    msg: format!("unknown metadata key '{other}'"),
                });
            }
        }
    }
    let lattice = lattice.ok_or(IngestError::Parse {
        line: meta_no,
        msg: "missing required Lattice key".into(),
    })?;

    let body = &lines[2..];
    if body.len() != declared {
        return Err(IngestError::CountMismatch {
            declared,
            found: body.len(),
        });
    }

    let mut species = Vec::with_capacity(declared);
    let mut positions = Vec::with_capacity(declared);
    let mut masses = Vec::with_capacity(declared);
    for (i, (line_no, raw)) in body.iter().enumerate() {
        let fields: Vec<&str> = raw.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(IngestError::Parse {
                line: *line_no,
                msg: format!(
                    "atom line needs 'symbol x y z', found {} fields",
                    fields.len()
                ),
            });
        }
        let sym = fields[0].to_string();
        let x = parse_finite(fields[1], *line_no, "x coordinate")?;
        let y = parse_finite(fields[2], *line_no, "y coordinate")?;
        let z = parse_finite(fields[3], *line_no, "z coordinate")?;
        let mass = match &mass_override {
            Some(list) => *list.get(i).ok_or(IngestError::Parse {
                line: meta_no,
                msg: format!("Masses lists {} values for {} atoms", list.len(), declared),
            })?,
            None => mass_of(&sym).ok_or(IngestError::UnknownElement {
                line: *line_no,
                symbol: sym.clone(),
            })?,
        };
        species.push(sym);
        positions.push([x, y, z]);
        masses.push(mass);
    }
    if let Some(list) = &mass_override {
        if list.len() != declared {
            return Err(IngestError::Parse {
                line: meta_no,
                msg: format!("Masses lists {} values for {} atoms", list.len(), declared),
            });
        }
    }

    Ok(AtomicStructure::new(lattice, species, positions, masses)?)
}

/// Writes a structure back to extended XYZ. Masses are always emitted so the
/// file re-parses to the identical structure regardless of element defaults.
/// Floats carry 17 significant digits and round-trip bit for bit.
pub fn serialize_structure(s: &AtomicStructure) -> String {
    let mut out = String::new();
    out.push_str(&format!("{}\n", s.len()));
    let lat: Vec<String> = s
        .lattice()
        .iter()
        .flatten()
        .map(|v| format!("{v:.16e}"))
        .collect();
    let masses: Vec<String> = s.masses().iter().map(|v| format!("{v:.16e}")).collect();
    out.push_str(&format!(
        "Lattice=\"{}\" Masses=\"{}\" Properties=species:S:1:pos:R:3 pbc=\"T T T\"\n",
        lat.join(" "),
        masses.join(" ")
    ));
    for (sym, p) in s.species().iter().zip(s.positions()) {
        out.push_str(&format!(
            "{sym} {:.16e} {:.16e} {:.16e}\n",
            p[0], p[1], p[2]
        ));
    }
    out
}
