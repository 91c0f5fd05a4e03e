//! Charge-state thermodynamics: transition levels, finite-size corrections,
//! and the Fermi-level stability diagram.
//!
//! For a defect with charge-state energies `E_q` (plus corrections), the
//! formation energy at Fermi level `eF` above the VBM is, up to a
//! charge-independent constant,
//!
//! ```text
//! Ef(q; eF) = E_q + E_corr_q + q * (e_vbm + eF)
//! ```
//!
//! The thermodynamic transition level between two charges is the Fermi level
//! where their formation energies cross,
//!
//! ```text
//! eps(q1/q2) = (E_q1 + E_corr_q1 - E_q2 - E_corr_q2) / (q2 - q1) - e_vbm
//! ```
//!
//! and the stable charge at each Fermi level is the lower envelope of the
//! formation-energy lines across the gap.

use crate::model::{ChargeStateRecord, HostParams};
use crate::units::{COULOMB_EV_ANGSTROM, MADELUNG_SC};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ChargeError {
    #[error("records share the same charge q = {0}")]
    EqualCharges(i32),
    #[error("duplicate charge state q = {0}")]
    DuplicateCharge(i32),
    #[error("invalid host: {0}")]
    InvalidHost(String),
    #[error("Fermi level {fermi} eV outside the gap [0, {gap}]")]
    FermiOutOfGap { fermi: f64, gap: f64 },
    #[error("need at least two charge states, got {0}")]
    TooFewRecords(usize),
}

/// Thermodynamic transition level eps(q1/q2) in eV above the VBM.
pub fn transition_level(
    r1: &ChargeStateRecord,
    r2: &ChargeStateRecord,
    host: &HostParams,
) -> Result<f64, ChargeError> {
    if r1.q == r2.q {
        return Err(ChargeError::EqualCharges(r1.q));
    }
    let dq = f64::from(r2.q - r1.q);
    Ok((r1.corrected() - r2.corrected()) / dq - host.e_vbm())
}

/// Leading-order monopole finite-size correction for a charged cubic
/// supercell, eV: `q^2 * alpha * e^2 / (4 pi eps0) / (2 eps_r L)` with the
/// simple-cubic Madelung constant alpha. Positive, added to the raw energy.
pub fn point_charge_correction(q: i32, host: &HostParams) -> Result<f64, ChargeError> {
    if host.cell_length() <= 0.0 {
        return Err(ChargeError::InvalidHost(format!(
            "cell length {} angstrom",
            host.cell_length()
        )));
    }
    if host.eps_r() <= 1.0 {
        return Err(ChargeError::InvalidHost(format!(
            "dielectric constant {}",
            host.eps_r()
        )));
    }
    let q2 = f64::from(q) * f64::from(q);
    Ok(q2 * MADELUNG_SC * COULOMB_EV_ANGSTROM / (2.0 * host.eps_r() * host.cell_length()))
}

/// Formation energy of one charge state at Fermi level `fermi` (eV above the
/// VBM), up to the charge-independent chemical-potential constant.
pub fn relative_formation_energy(
    record: &ChargeStateRecord,
    host: &HostParams,
    fermi: f64,
) -> Result<f64, ChargeError> {
    if !(0.0..=host.gap()).contains(&fermi) {
        return Err(ChargeError::FermiOutOfGap {
            fermi,
            gap: host.gap(),
        });
    }
    Ok(record.corrected() + f64::from(record.q) * (host.e_vbm() + fermi))
}

/// One maximal Fermi-level interval over which a single charge state is the
/// ground state.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityInterval {
    /// Interval start, eV above the VBM.
    pub from: f64,
    /// Interval end, eV above the VBM.
    pub to: f64,
    pub q: i32,
    pub label: String,
}

/// Stable-charge map across the gap plus the transition levels between
/// adjacent stable states.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityDiagram {
    /// Contiguous intervals covering [0, gap], in ascending Fermi order.
    pub intervals: Vec<StabilityInterval>,
    /// Transition levels `(q_above, q_below, eps_eV)` at interval boundaries:
    /// `q_above` is stable just below the level, `q_below` just above it.
    pub transitions: Vec<(i32, i32, f64)>,
}

impl StabilityDiagram {
    /// Stable charge at the given Fermi level, eV above the VBM.
    pub fn stable_charge(&self, fermi: f64) -> Option<i32> {
        self.intervals
            .iter()
            .find(|iv| fermi >= iv.from && fermi <= iv.to)
            .map(|iv| iv.q)
    }
}

/// Builds the stability diagram: the lower envelope of the formation-energy
/// lines over the gap window.
///
/// Lines are processed in decreasing slope (charge) order with a convex-chain
/// stack, so the result is exact up to float rounding. At a degenerate
/// crossing the more negative charge wins on the high-Fermi side.
pub fn stability_diagram(
    records: &[ChargeStateRecord],
    host: &HostParams,
) -> Result<StabilityDiagram, ChargeError> {
    if records.len() < 2 {
        return Err(ChargeError::TooFewRecords(records.len()));
    }
    let mut sorted: Vec<&ChargeStateRecord> = records.iter().collect();
    sorted.sort_by_key(|r| std::cmp::Reverse(r.q));
    for pair in sorted.windows(2) {
        if pair[0].q == pair[1].q {
            return Err(ChargeError::DuplicateCharge(pair[0].q));
        }
    }

    // Lower envelope of y = m x + b with m = q, b = corrected + q * e_vbm.
    // Stack entries: (record index into `sorted`, x where its segment starts).
    let slope = |r: &ChargeStateRecord| f64::from(r.q);
    let intercept = |r: &ChargeStateRecord| r.corrected() + f64::from(r.q) * host.e_vbm();
    let cross = |a: &ChargeStateRecord, b: &ChargeStateRecord| {
        (intercept(b) - intercept(a)) / (slope(a) - slope(b))
    };

    let mut stack: Vec<(usize, f64)> = Vec::new();
    for (i, r) in sorted.iter().enumerate() {
        let mut start = f64::NEG_INFINITY;
        while let Some(&(j, xj)) = stack.last() {
            let x = cross(sorted[j], r);
            if x <= xj {
                // New line overtakes the whole previous segment.
                stack.pop();
            } else {
                start = x;
                break;
            }
        }
        stack.push((i, start));
    }

    // Clip the envelope to [0, gap] and drop zero-width pieces.
    let gap = host.gap();
    let mut intervals: Vec<StabilityInterval> = Vec::new();
    for (pos, &(i, xs)) in stack.iter().enumerate() {
        let xe = stack.get(pos + 1).map_or(f64::INFINITY, |&(_, x)| x);
        let from = xs.max(0.0);
        let to = xe.min(gap);
        if to > from {
            intervals.push(StabilityInterval {
                from,
                to,
                q: sorted[i].q,
                label: sorted[i].label.clone(),
            });
        }
    }

    // Boundary levels between adjacent stable states, recomputed through
    // transition_level so diagram and pairwise API agree exactly.
    let mut transitions = Vec::new();
    for w in intervals.windows(2) {
        let (above, below) = (&w[0], &w[1]);
        let ra = sorted.iter().find(|r| r.q == above.q).unwrap();
        let rb = sorted.iter().find(|r| r.q == below.q).unwrap();
        let eps = transition_level(ra, rb, host)?;
        transitions.push((above.q, below.q, eps));
    }

    Ok(StabilityDiagram {
        intervals,
        transitions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn host() -> HostParams {
        HostParams::diamond()
    }

    fn rec(q: i32, e: f64) -> ChargeStateRecord {
        ChargeStateRecord::new(format!("XV:{q}"), q, e, 0.0)
    }

    #[test]
    fn transition_level_basics() {
        // eps(0/-1) = E_0 - E_-1 ... sign convention: (E_q1 - E_q2)/(q2 - q1).
        let r0 = rec(0, -100.0);
        let rm = rec(-1, -99.0);
        let h = host();
        let eps = transition_level(&r0, &rm, &h).unwrap();
        assert!((eps - 1.0).abs() < 1e-14);
        // Swapping arguments leaves the level unchanged.
        let eps2 = transition_level(&rm, &r0, &h).unwrap();
        assert!((eps - eps2).abs() < 1e-14);
        assert!(matches!(
            transition_level(&r0, &r0, &h),
            Err(ChargeError::EqualCharges(0))
        ));
    }

    #[test]
    fn transition_level_shift_invariance() {
        // Adding a constant to every record and to e_vbm cancels.
        let r0 = rec(0, -100.0);
        let rm = rec(-1, -99.0);
        let h1 = HostParams::new(5.47, 0.0, 5.7, 14.2).unwrap();
        let h2 = HostParams::new(5.47, 2.5, 5.7, 14.2).unwrap();
        let a = transition_level(&r0, &rm, &h1).unwrap();
        let shifted0 = rec(0, -100.0);
        let shifted_m = ChargeStateRecord::new("XV:-1", -1, -99.0 + 2.5, 0.0);
        let b = transition_level(&shifted0, &shifted_m, &h2).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn telescoping_identity() {
        // (q3-q1) eps(q1/q3) = (q2-q1) eps(q1/q2) + (q3-q2) eps(q2/q3).
        let h = host();
        let (q1, q2, q3) = (1, 0, -1);
        let r1 = rec(q1, -100.4);
        let r2 = rec(q2, -100.0);
        let r3 = rec(q3, -99.0);
        let e13 = transition_level(&r1, &r3, &h).unwrap();
        let e12 = transition_level(&r1, &r2, &h).unwrap();
        let e23 = transition_level(&r2, &r3, &h).unwrap();
        let lhs = e13 * f64::from(q3 - q1);
        let rhs = e12 * f64::from(q2 - q1) + e23 * f64::from(q3 - q2);
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn point_charge_correction_value() {
        // q = -1, eps_r = 5.7, L = 14.2 A: 2.837297 * 14.3996 / (2*5.7*14.2)
        // = 0.25238412330862364 eV, frozen from an independent evaluation.
        let h = host();
        let c = point_charge_correction(-1, &h).unwrap();
        assert!((c - 0.252_384_123_308_623_64).abs() < 1e-15);
        // Scales as q^2.
        let c2 = point_charge_correction(2, &h).unwrap();
        assert!((c2 - 4.0 * c).abs() < 1e-14);
        assert_eq!(point_charge_correction(0, &h).unwrap(), 0.0);
    }

    #[test]
    fn formation_energy_and_gap_guard() {
        let h = host();
        let r = rec(-1, -99.0);
        let f = relative_formation_energy(&r, &h, 1.0).unwrap();
        assert!((f - (-100.0)).abs() < 1e-14);
        assert!(matches!(
            relative_formation_energy(&r, &h, -0.1),
            Err(ChargeError::FermiOutOfGap { .. })
        ));
        assert!(matches!(
            relative_formation_energy(&r, &h, 5.48),
            Err(ChargeError::FermiOutOfGap { .. })
        ));
    }

    #[test]
    fn diagram_on_known_ladder() {
        // Levels at 0.4, 1.0, 4.0 eV; stable sequence +1, 0, -1, -2.
        let h = host();
        let records = vec![
            rec(1, -100.4),
            rec(0, -100.0),
            rec(-1, -99.0),
            rec(-2, -95.0),
        ];
        let d = stability_diagram(&records, &h).unwrap();
        let qs: Vec<i32> = d.intervals.iter().map(|iv| iv.q).collect();
        assert_eq!(qs, vec![1, 0, -1, -2]);
        assert_eq!(d.transitions.len(), 3);
        assert!((d.transitions[0].2 - 0.4).abs() < 1e-12);
        assert!((d.transitions[1].2 - 1.0).abs() < 1e-12);
        assert!((d.transitions[2].2 - 4.0).abs() < 1e-12);
        assert_eq!(d.stable_charge(h.midgap()), Some(-1));
        assert_eq!(d.stable_charge(0.0), Some(1));
        assert_eq!(d.stable_charge(5.47), Some(-2));
        // Intervals tile the gap.
        assert_eq!(d.intervals[0].from, 0.0);
        assert_eq!(d.intervals.last().unwrap().to, h.gap());
        for w in d.intervals.windows(2) {
            assert!((w[0].to - w[1].from).abs() < 1e-12);
        }
    }

    #[test]
    fn diagram_skips_never_stable_states() {
        // A high-energy q = 0 line never touches the envelope.
        let h = host();
        let records = vec![rec(1, -100.4), rec(0, -90.0), rec(-1, -99.1)];
        let d = stability_diagram(&records, &h).unwrap();
        let qs: Vec<i32> = d.intervals.iter().map(|iv| iv.q).collect();
        assert_eq!(qs, vec![1, -1]);
        assert_eq!(d.transitions.len(), 1);
        // Direct (+1/-1) crossing: (E_+1 - E_-1)/(-1 - 1) = 0.65.
        assert!((d.transitions[0].2 - 0.65).abs() < 1e-12);
    }

    #[test]
    fn diagram_errors() {
        let h = host();
        assert!(matches!(
            stability_diagram(&[rec(0, -1.0)], &h),
            Err(ChargeError::TooFewRecords(1))
        ));
        assert!(matches!(
            stability_diagram(&[rec(0, -1.0), rec(0, -2.0)], &h),
            Err(ChargeError::DuplicateCharge(0))
        ));
    }

    proptest! {
        // Envelope agrees with brute-force argmin on a dense Fermi grid, and
        // the stable charge sequence is strictly decreasing.
        #[test]
        fn envelope_matches_brute_force(
            energies in proptest::collection::vec(-105.0f64..-95.0, 5),
        ) {
            let h = host();
            let records: Vec<ChargeStateRecord> = energies
                .iter()
                .enumerate()
                .map(|(i, &e)| rec(2 - i as i32, e))
                .collect();
            let d = stability_diagram(&records, &h).unwrap();

            for w in d.intervals.windows(2) {
                prop_assert!(w[1].q < w[0].q);
            }

            let steps = 1000usize;
            for i in 0..=steps {
                let fermi = h.gap() * i as f64 / steps as f64;
                // Skip grid points hugging a boundary where argmin ties.
                if d
                    .transitions
                    .iter()
                    .any(|&(_, _, eps)| (fermi - eps).abs() < 1e-9)
                {
                    continue;
                }
                let brute = records
                    .iter()
                    .map(|r| {
                        (r.q, relative_formation_energy(r, &h, fermi).unwrap())
                    })
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .unwrap()
                    .0;
                prop_assert_eq!(d.stable_charge(fermi), Some(brute));
            }
        }

        // Shifting all record energies by a constant moves nothing.
        #[test]
        fn diagram_shift_invariance(
            energies in proptest::collection::vec(-105.0f64..-95.0, 4),
            shift in -50.0f64..50.0,
        ) {
            let h = host();
            let a: Vec<ChargeStateRecord> = energies
                .iter()
                .enumerate()
                .map(|(i, &e)| rec(1 - i as i32, e))
                .collect();
            let b: Vec<ChargeStateRecord> = a
                .iter()
                .map(|r| ChargeStateRecord::new(r.label.clone(), r.q, r.e_tot + shift, 0.0))
                .collect();
            let da = stability_diagram(&a, &h).unwrap();
            let db = stability_diagram(&b, &h).unwrap();
            prop_assert_eq!(da.intervals.len(), db.intervals.len());
            for (ia, ib) in da.intervals.iter().zip(&db.intervals) {
                prop_assert_eq!(ia.q, ib.q);
                prop_assert!((ia.from - ib.from).abs() < 1e-9);
                prop_assert!((ia.to - ib.to).abs() < 1e-9);
            }
        }
    }
}
