//! Vibronic coupling between two electronic states: per-mode displacements,
//! partial coupling weights, the phonon spectral density, and the emission
//! lineshape built from it.
//!
//! The chain is
//!
//! ```text
//! geometries -> dq_k -> S_k = omega_k dq_k^2 / (2 hbar^2) -> S(eps) -> A(E)
//! ```
//!
//! where `dq_k` is the mass-weighted displacement projected on mode `k`
//! (sqrt(amu)*angstrom), `S_k` the dimensionless partial weight, `S(eps)` the
//! Gaussian-broadened spectral density, and `A(E)` the normalized emission
//! function at zero temperature. The weight of the zero-phonon line is
//! `exp(-S)` with `S` the total coupling weight.

mod lineshape;
mod oracle;

pub use lineshape::{lineshape, LineshapeResult};
pub use oracle::fc_oracle;

use crate::model::{align_structures, AtomicStructure, ModelError, PhononModeSet};
use crate::units::HBAR_SQ_MEV_AMU_A2;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VibronicError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("modes belong to a different structure: {0}")]
    ReferenceMismatch(String),
    #[error("length mismatch: {0} displacements vs {1} frequencies")]
    LengthMismatch(usize, usize),
    #[error("negative partial weight S_{0} = {1}")]
    NegativeWeight(usize, f64),
    #[error("total coupling weight must be non-negative and finite, got {0}")]
    NegativeTotalWeight(f64),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid step {step} meV exceeds the zero-phonon width {gamma} meV; the time window cannot resolve the line")]
    NyquistViolation { step: f64, gamma: f64 },
    #[error("zero-phonon energy must be positive, got {0} eV")]
    NonPositiveZpl(f64),
    #[error("non-uniform energy grid near index {0}")]
    NonUniformGrid(usize),
    #[error("spectral value {value} at index {index} below the negativity floor")]
    NegativeValue { index: usize, value: f64 },
    #[error("reference oracle mode {0} is invalid: {1}")]
    BadOracleMode(usize, String),
    #[error("reference oracle supports at most 4 modes, got {0}")]
    TooManyModes(usize),
    #[error(
        "oracle truncation at {max_quanta} quanta keeps only {retained} of the weight of mode {index}"
    )]
    TruncationTooCoarse {
        index: usize,
        max_quanta: usize,
        retained: f64,
    },
}

/// Per-mode vibronic coupling decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct HRDecomposition {
    /// Mode energies, meV.
    pub frequencies_mev: Vec<f64>,
    /// Projected displacements, sqrt(amu)*angstrom.
    pub displacements: Vec<f64>,
    /// Dimensionless partial weights S_k.
    pub partial: Vec<f64>,
    /// Total coupling weight (sum of partials).
    pub s_total: f64,
}

/// A non-negative function sampled on a uniform energy grid (meV). Used for
/// both the phonon spectral density and windowed emission spectra.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction {
    grid_mev: Vec<f64>,
    values: Vec<f64>,
}

impl SpectralFunction {
    /// Validates uniform spacing and non-negativity. Values within the
    /// -1e-12 * max rounding floor are clamped to zero; anything lower is an
    /// error.
    pub fn new(grid_mev: Vec<f64>, values: Vec<f64>) -> Result<Self, VibronicError> {
        if grid_mev.len() != values.len() {
            return Err(VibronicError::LengthMismatch(values.len(), grid_mev.len()));
        }
        if grid_mev.len() < 2 {
            return Err(VibronicError::InvalidGrid(
                "need at least 2 grid points".into(),
            ));
        }
        let step = grid_mev[1] - grid_mev[0];
        if !step.is_finite() || step <= 0.0 {
            return Err(VibronicError::InvalidGrid(format!("grid step {step} meV")));
        }
        for (i, w) in grid_mev.windows(2).enumerate() {
            if ((w[1] - w[0]) - step).abs() > 1e-6 * step {
                return Err(VibronicError::NonUniformGrid(i + 1));
            }
        }
        let peak = values.iter().cloned().fold(0.0f64, f64::max);
        let floor = -1e-12 * peak.max(1.0);
        let mut clamped = values;
        for (i, v) in clamped.iter_mut().enumerate() {
            if !v.is_finite() || *v < floor {
                return Err(VibronicError::NegativeValue {
                    index: i,
                    value: *v,
                });
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        Ok(Self {
            grid_mev,
            values: clamped,
        })
    }

    pub fn grid_mev(&self) -> &[f64] {
        &self.grid_mev
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid_mev.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid spacing, meV.
    pub fn step(&self) -> f64 {
        self.grid_mev[1] - self.grid_mev[0]
    }

    /// Riemann-sum integral over the grid.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.step()
    }
}

/// Projects the geometry change between two relaxed structures onto each
/// phonon mode: `dq_k = sum_i sqrt(m_i) (R_e,i - R_g,i) . e_k,i` in
/// sqrt(amu)*angstrom.
///
/// Structures are centroid-aligned internally, so a rigid translation between
/// the files contributes nothing. The mode set must describe the ground
/// structure (same atoms, same masses).
pub fn mode_displacements(
    ground: &AtomicStructure,
    excited: &AtomicStructure,
    modes: &PhononModeSet,
) -> Result<Vec<f64>, VibronicError> {
    let reference = modes.reference();
    if reference.len() != ground.len() {
        return Err(VibronicError::ReferenceMismatch(format!(
            "mode set built for {} atoms, ground structure has {}",
            reference.len(),
            ground.len()
        )));
    }
    for (i, (a, b)) in reference.species().iter().zip(ground.species()).enumerate() {
        if a != b {
            return Err(VibronicError::ReferenceMismatch(format!(
                "species differ at atom {i}: mode set has {a}, ground has {b}"
            )));
        }
    }
    for (i, (ma, mb)) in reference.masses().iter().zip(ground.masses()).enumerate() {
        if (ma - mb).abs() > 1e-9 * ma.max(*mb) {
            return Err(VibronicError::ReferenceMismatch(format!(
                "masses differ at atom {i}: mode set has {ma} amu, ground has {mb}"
            )));
        }
    }

    let (g, e) = align_structures(ground, excited)?;
    let n = g.len();
    let mut weighted = Vec::with_capacity(3 * n);
    for i in 0..n {
        let sm = g.masses()[i].sqrt();
        for d in 0..3 {
            weighted.push(sm * (e.positions()[i][d] - g.positions()[i][d]));
        }
    }
    Ok(modes
        .eigenvectors()
        .iter()
        .map(|ev| ev.iter().zip(&weighted).map(|(a, b)| a * b).sum())
        .collect())
}

/// Partial coupling weights from projected displacements and mode energies:
/// `S_k = omega_k dq_k^2 / (2 hbar^2)` in the working units. Zero-frequency
/// modes (rigid translations) are assigned zero weight.
pub fn partial_hr_factors(
    displacements: &[f64],
    frequencies_mev: &[f64],
) -> Result<HRDecomposition, VibronicError> {
    if displacements.len() != frequencies_mev.len() {
        return Err(VibronicError::LengthMismatch(
            displacements.len(),
            frequencies_mev.len(),
        ));
    }
    if displacements.is_empty() {
        return Err(VibronicError::InvalidGrid("no modes".into()));
    }
    let mut partial = Vec::with_capacity(displacements.len());
    for (k, (&dq, &w)) in displacements.iter().zip(frequencies_mev).enumerate() {
        if !w.is_finite() || w < 0.0 {
            return Err(VibronicError::Model(ModelError::NegativeFrequency(k, w)));
        }
        if !dq.is_finite() {
            return Err(VibronicError::NegativeWeight(k, f64::NAN));
        }
        let s = if w == 0.0 {
            0.0
        } else {
            w * dq * dq / (2.0 * HBAR_SQ_MEV_AMU_A2)
        };
        partial.push(s);
    }
    let s_total = partial.iter().sum();
    Ok(HRDecomposition {
        frequencies_mev: frequencies_mev.to_vec(),
        displacements: displacements.to_vec(),
        partial,
        s_total,
    })
}

/// Gaussian-broadened phonon spectral density on [0, grid_max]:
/// `S(eps) = sum_k S_k N(eps; omega_k, sigma)` per meV, sampled every
/// `grid_step`.
pub fn spectral_density(
    hr: &HRDecomposition,
    grid_max_mev: f64,
    grid_step_mev: f64,
    sigma_mev: f64,
) -> Result<SpectralFunction, VibronicError> {
    if !grid_step_mev.is_finite() || grid_step_mev <= 0.0 {
        return Err(VibronicError::InvalidGrid(format!(
            "grid step {grid_step_mev} meV"
        )));
    }
    if !grid_max_mev.is_finite() || grid_max_mev <= grid_step_mev {
        return Err(VibronicError::InvalidGrid(format!(
            "grid max {grid_max_mev} meV must exceed the step"
        )));
    }
    if !sigma_mev.is_finite() || sigma_mev <= 0.0 {
        return Err(VibronicError::InvalidGrid(format!(
            "broadening sigma {sigma_mev} meV"
        )));
    }
    let m = (grid_max_mev / grid_step_mev).round() as usize;
    if m < 2 {
        return Err(VibronicError::InvalidGrid(
            "grid resolves fewer than 3 points".into(),
        ));
    }
    let norm = 1.0 / (sigma_mev * (2.0 * std::f64::consts::PI).sqrt());
    let mut grid = Vec::with_capacity(m + 1);
    let mut values = vec![0.0; m + 1];
    for j in 0..=m {
        grid.push(j as f64 * grid_step_mev);
    }
    for (&s, &w) in hr.partial.iter().zip(&hr.frequencies_mev) {
        if s == 0.0 {
            continue;
        }
        if s < 0.0 {
            return Err(VibronicError::NegativeTotalWeight(s));
        }
        for (j, v) in values.iter_mut().enumerate() {
            let t = (grid[j] - w) / sigma_mev;
            *v += s * norm * (-0.5 * t * t).exp();
        }
    }
    SpectralFunction::new(grid, values)
}

/// Zero-phonon-line weight `exp(-S)` for total coupling weight `S >= 0`.
pub fn debye_waller(s_total: f64) -> Result<f64, VibronicError> {
    if !s_total.is_finite() || s_total < 0.0 {
        return Err(VibronicError::NegativeTotalWeight(s_total));
    }
    Ok((-s_total).exp())
}
