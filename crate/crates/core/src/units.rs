//! Unit conventions and physical constants used across the crate.
//!
//! Single unit ledger, applied everywhere without per-call conversions:
//!
//! | quantity              | unit          |
//! |-----------------------|---------------|
//! | length, displacement  | angstrom      |
//! | mass                  | amu           |
//! | electronic energy     | eV            |
//! | vibrational energy    | meV           |
//! | mass-weighted coord   | sqrt(amu)*angstrom |
//!
//! Functions state their units in the signature docs; nothing switches
//! convention mid-pipeline.

/// Planck constant over 2*pi, J*s (CODATA 2022; h is exact).
const HBAR_J_S: f64 = 6.626_070_15e-34 / (2.0 * std::f64::consts::PI);

/// Unified atomic mass unit, kg (CODATA 2022).
const AMU_KG: f64 = 1.660_539_068_92e-27;

/// Electron volt, J (exact).
const EV_J: f64 = 1.602_176_634e-19;

/// hbar^2 expressed in meV * amu * angstrom^2.
///
/// This is the only bridge between geometry (amu, angstrom) and vibrational
/// energy (meV): a partial Huang-Rhys factor is
/// `S_k = omega_k * dq_k^2 / (2 * HBAR_SQ_MEV_AMU_A2)`
/// with `omega_k` in meV and `dq_k` in sqrt(amu)*angstrom.
pub const HBAR_SQ_MEV_AMU_A2: f64 = HBAR_J_S * HBAR_J_S / (AMU_KG * 1e-20) / (EV_J * 1e-3);

/// Coulomb constant e^2 / (4 pi eps0) in eV * angstrom.
pub const COULOMB_EV_ANGSTROM: f64 = 14.3996;

/// Madelung constant of the simple-cubic point-charge lattice, used by the
/// monopole finite-size correction for charged supercells.
pub const MADELUNG_SC: f64 = 2.837_297;

/// meV per eV.
pub const MEV_PER_EV: f64 = 1000.0;
