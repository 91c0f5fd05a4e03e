//! Post-processing for color-center defect calculations: charge-state
//! stability across the gap, degenerate-mode (Jahn-Teller) surface
//! characterization, and zero-temperature vibronic emission lineshapes.
//!
//! The crate turns relaxed geometries, phonon modes, and total energies into
//! the observables an experiment sees:
//!
//! * [`charge`]: thermodynamic transition levels, finite-size corrections,
//!   and the stable-charge diagram over the Fermi window.
//! * [`jt`]: the two-sheet E(x)e adiabatic surface, fitted from relaxation
//!   energy and barrier or built from couplings, with analytic extrema and
//!   scan cuts.
//! * [`vibronic`]: per-mode displacements, partial coupling weights, phonon
//!   spectral densities, and the emission function via the
//!   generating-function method, plus an explicit Franck-Condon oracle for
//!   cross-checks.
//! * [`ingest`]: strict parsers and writers for the file formats involved.
//! * [`model`]: the shared validated domain types.
//! * [`units`]: the single unit ledger (angstrom, amu, eV, meV) and the
//!   physical constants bridging them.

pub mod charge;
pub mod ingest;
pub mod jt;
pub mod model;
pub mod units;
pub mod vibronic;

pub use charge::{
    point_charge_correction, relative_formation_energy, stability_diagram, transition_level,
    ChargeError, StabilityDiagram, StabilityInterval,
};
pub use ingest::{
    parse_charge_records, parse_config, parse_phonons, parse_structure, IngestError, PipelineConfig,
};
pub use jt::{JTExtrema, JTModel, JtError, ScanCurve};
pub use model::{
    align_structures, mass_weighted_distance, AtomicStructure, ChargeStateRecord, HostParams,
    ModelError, PhononModeSet,
};
pub use vibronic::{
    debye_waller, fc_oracle, lineshape, mode_displacements, partial_hr_factors, spectral_density,
    HRDecomposition, LineshapeResult, SpectralFunction, VibronicError,
};
