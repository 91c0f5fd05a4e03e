//! Domain types shared by every stage: periodic structures, phonon mode sets,
//! charge-state records, and host-crystal parameters.
//!
//! All constructors validate their invariants up front so downstream code can
//! rely on well-formed inputs instead of re-checking them.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("atom count mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("species mismatch at atom {index}: {left} vs {right}")]
    SpeciesMismatch {
        index: usize,
        left: String,
        right: String,
    },
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("mode {0} has negative frequency {1} meV")]
    NegativeFrequency(usize, f64),
    #[error("modes {0} and {1} are not orthonormal: inner product {2}")]
    NonOrthonormal(usize, usize, f64),
    #[error("invalid host parameters: {0}")]
    InvalidHost(String),
}

/// Periodic atomic structure: lattice rows in angstrom, Cartesian positions in
/// angstrom, per-atom masses in amu.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicStructure {
    lattice: [[f64; 3]; 3],
    species: Vec<String>,
    positions: Vec<[f64; 3]>,
    masses: Vec<f64>,
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

impl AtomicStructure {
    /// Validates: at least one atom, parallel arrays of equal length, all
    /// masses strictly positive, all coordinates finite, non-singular lattice.
    pub fn new(
        lattice: [[f64; 3]; 3],
        species: Vec<String>,
        positions: Vec<[f64; 3]>,
        masses: Vec<f64>,
    ) -> Result<Self, ModelError> {
        if species.is_empty() {
            return Err(ModelError::InvalidStructure("no atoms".into()));
        }
        if species.len() != positions.len() || species.len() != masses.len() {
            return Err(ModelError::InvalidStructure(format!(
                "parallel arrays disagree: {} species, {} positions, {} masses",
                species.len(),
                positions.len(),
                masses.len()
            )));
        }
        for row in &lattice {
            for c in row {
                if !c.is_finite() {
                    return Err(ModelError::InvalidStructure(
                        "non-finite lattice entry".into(),
                    ));
                }
            }
        }
        if det3(&lattice).abs() < 1e-12 {
            return Err(ModelError::InvalidStructure("singular lattice".into()));
        }
        for (i, p) in positions.iter().enumerate() {
            if p.iter().any(|c| !c.is_finite()) {
                return Err(ModelError::InvalidStructure(format!(
                    "non-finite position for atom {i}"
                )));
            }
        }
        for (i, &m) in masses.iter().enumerate() {
            if m <= 0.0 || !m.is_finite() {
                return Err(ModelError::InvalidStructure(format!(
                    "non-positive mass {m} for atom {i}"
                )));
            }
        }
        Ok(Self {
            lattice,
            species,
            positions,
            masses,
        })
    }

    pub fn len(&self) -> usize {
        self.species.len()
    }

    /// Structures always hold at least one atom.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn lattice(&self) -> &[[f64; 3]; 3] {
        &self.lattice
    }

    pub fn species(&self) -> &[String] {
        &self.species
    }

    pub fn positions(&self) -> &[[f64; 3]] {
        &self.positions
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Mass-weighted centroid in angstrom.
    pub fn mass_weighted_centroid(&self) -> [f64; 3] {
        let mut c = [0.0; 3];
        for (p, &m) in self.positions.iter().zip(&self.masses) {
            for d in 0..3 {
                c[d] += m * p[d];
            }
        }
        let total = self.total_mass();
        for v in &mut c {
            *v /= total;
        }
        c
    }

    fn translated(&self, shift: [f64; 3]) -> Self {
        let positions = self
            .positions
            .iter()
            .map(|p| [p[0] + shift[0], p[1] + shift[1], p[2] + shift[2]])
            .collect();
        Self {
            lattice: self.lattice,
            species: self.species.clone(),
            positions,
            masses: self.masses.clone(),
        }
    }
}

/// Checks that two structures describe the same atoms in the same order.
pub(crate) fn check_compatible(a: &AtomicStructure, b: &AtomicStructure) -> Result<(), ModelError> {
    if a.len() != b.len() {
        return Err(ModelError::SizeMismatch(a.len(), b.len()));
    }
    for (i, (sa, sb)) in a.species.iter().zip(&b.species).enumerate() {
        if sa != sb {
            return Err(ModelError::SpeciesMismatch {
                index: i,
                left: sa.clone(),
                right: sb.clone(),
            });
        }
    }
    Ok(())
}

/// Removes the rigid translation between two structures by shifting each to a
/// common mass-weighted centroid (the centroid of `a`). Translation only: no
/// rotation or cell change, so mode projections stay meaningful.
pub fn align_structures(
    a: &AtomicStructure,
    b: &AtomicStructure,
) -> Result<(AtomicStructure, AtomicStructure), ModelError> {
    check_compatible(a, b)?;
    let ca = a.mass_weighted_centroid();
    let cb = b.mass_weighted_centroid();
    let shift = [ca[0] - cb[0], ca[1] - cb[1], ca[2] - cb[2]];
    Ok((a.clone(), b.translated(shift)))
}

/// Mass-weighted distance between two structures in sqrt(amu)*angstrom:
/// `sqrt(sum_i m_i |R_i^a - R_i^b|^2)`.
///
/// Callers are expected to align first; this measures whatever displacement
/// field is present, rigid translation included.
pub fn mass_weighted_distance(a: &AtomicStructure, b: &AtomicStructure) -> Result<f64, ModelError> {
    check_compatible(a, b)?;
    let mut acc = 0.0;
    for ((pa, pb), &m) in a.positions.iter().zip(&b.positions).zip(&a.masses) {
        let dx = pa[0] - pb[0];
        let dy = pa[1] - pb[1];
        let dz = pa[2] - pb[2];
        acc += m * (dx * dx + dy * dy + dz * dz);
    }
    Ok(acc.sqrt())
}

/// Harmonic phonon modes of a reference structure. Eigenvectors are
/// mass-weighted and orthonormal; frequencies are in meV.
#[derive(Debug, Clone)]
pub struct PhononModeSet {
    frequencies_mev: Vec<f64>,
    eigenvectors: Vec<Vec<f64>>,
    reference: AtomicStructure,
}

impl PhononModeSet {
    /// Validates: mode count within 3N, eigenvector length 3N, frequencies
    /// non-negative and finite, pairwise mass-weighted orthonormality within
    /// 1e-6.
    pub fn new(
        frequencies_mev: Vec<f64>,
        eigenvectors: Vec<Vec<f64>>,
        reference: AtomicStructure,
    ) -> Result<Self, ModelError> {
        let n3 = 3 * reference.len();
        if frequencies_mev.len() != eigenvectors.len() {
            return Err(ModelError::InvalidStructure(format!(
                "{} frequencies for {} eigenvectors",
                frequencies_mev.len(),
                eigenvectors.len()
            )));
        }
        if eigenvectors.is_empty() || eigenvectors.len() > n3 {
            return Err(ModelError::InvalidStructure(format!(
                "{} modes for {} atoms",
                eigenvectors.len(),
                reference.len()
            )));
        }
        for (k, (&f, e)) in frequencies_mev.iter().zip(&eigenvectors).enumerate() {
            if !f.is_finite() || f < 0.0 {
                return Err(ModelError::NegativeFrequency(k, f));
            }
            if e.len() != n3 {
                return Err(ModelError::InvalidStructure(format!(
                    "eigenvector {} has length {}, expected {}",
                    k,
                    e.len(),
                    n3
                )));
            }
            if e.iter().any(|c| !c.is_finite()) {
                return Err(ModelError::InvalidStructure(format!(
                    "non-finite entry in eigenvector {k}"
                )));
            }
        }
        for j in 0..eigenvectors.len() {
            for k in j..eigenvectors.len() {
                let dot: f64 = eigenvectors[j]
                    .iter()
                    .zip(&eigenvectors[k])
                    .map(|(x, y)| x * y)
                    .sum();
                let expect = if j == k { 1.0 } else { 0.0 };
                if (dot - expect).abs() > 1e-6 {
                    return Err(ModelError::NonOrthonormal(j, k, dot));
                }
            }
        }
        Ok(Self {
            frequencies_mev,
            eigenvectors,
            reference,
        })
    }

    pub fn len(&self) -> usize {
        self.frequencies_mev.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn frequencies_mev(&self) -> &[f64] {
        &self.frequencies_mev
    }

    pub fn eigenvectors(&self) -> &[Vec<f64>] {
        &self.eigenvectors
    }

    pub fn reference(&self) -> &AtomicStructure {
        &self.reference
    }
}

/// One charge state of the defect: total supercell energy and an optional
/// finite-size correction, both in eV relative to the same reference.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargeStateRecord {
    pub label: String,
    pub q: i32,
    pub e_tot: f64,
    pub e_corr: f64,
}

impl ChargeStateRecord {
    pub fn new(label: impl Into<String>, q: i32, e_tot: f64, e_corr: f64) -> Self {
        Self {
            label: label.into(),
            q,
            e_tot,
            e_corr,
        }
    }

    /// Corrected total energy in eV.
    pub fn corrected(&self) -> f64 {
        self.e_tot + self.e_corr
    }
}

/// Host-crystal parameters for a defect calculation: band gap and VBM
/// reference in eV, static dielectric constant, cubic supercell edge in
/// angstrom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HostParams {
    gap: f64,
    e_vbm: f64,
    eps_r: f64,
    cell_length: f64,
}

impl HostParams {
    /// Validates: gap > 0, eps_r > 1, both finite.
    pub fn new(gap: f64, e_vbm: f64, eps_r: f64, cell_length: f64) -> Result<Self, ModelError> {
        if !gap.is_finite() || gap <= 0.0 {
            return Err(ModelError::InvalidHost(format!("gap {gap} eV")));
        }
        if !e_vbm.is_finite() {
            return Err(ModelError::InvalidHost("non-finite VBM".into()));
        }
        if !eps_r.is_finite() || eps_r <= 1.0 {
            return Err(ModelError::InvalidHost(format!(
                "dielectric constant {eps_r} must exceed 1"
            )));
        }
        if !cell_length.is_finite() {
            return Err(ModelError::InvalidHost("non-finite cell length".into()));
        }
        Ok(Self {
            gap,
            e_vbm,
            eps_r,
            cell_length,
        })
    }

    /// Diamond host defaults: 5.47 eV gap, VBM at 0, eps_r 5.7, 14.2 A cell
    /// (4x4x4 conventional supercell edge).
    pub fn diamond() -> Self {
        Self::new(5.47, 0.0, 5.7, 14.2).expect("diamond defaults are valid")
    }

    pub fn gap(&self) -> f64 {
        self.gap
    }

    pub fn e_vbm(&self) -> f64 {
        self.e_vbm
    }

    pub fn eps_r(&self) -> f64 {
        self.eps_r
    }

    pub fn cell_length(&self) -> f64 {
        self.cell_length
    }

    /// Midgap Fermi level relative to the VBM, eV.
    pub fn midgap(&self) -> f64 {
        0.5 * self.gap
    }
}
