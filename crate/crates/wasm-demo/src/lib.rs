//! Browser bindings for the defect-photonics toolkit.
//!
//! Three entry points, one per interactive panel, each returning a JSON
//! string so the page needs no generated TypeScript: a degenerate-mode
//! surface explorer, a single-effective-mode emission lineshape, and a
//! charge-state stability diagram. Failures come back as `{"error": "..."}`
//! rather than thrown exceptions, which keeps the JS side a one-liner and
//! lets the same functions run natively under `cargo test`.
//!
//! Build for the web with `wasm-pack build --target web --out-dir www/pkg`
//! from this crate's directory, then serve `www/`.

use defect_photonics::units::HBAR_SQ_MEV_AMU_A2;
use defect_photonics::{
    lineshape, partial_hr_factors, spectral_density, stability_diagram, ChargeStateRecord,
    HostParams, JTModel,
};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn err_json(msg: impl std::fmt::Display) -> String {
    json!({ "error": msg.to_string() }).to_string()
}

/// Points per curve sent to the page; enough for a crisp canvas plot while
/// keeping slider-driven recomputation cheap.
const PLOT_POINTS: usize = 1200;

fn decimate(xs: &[f64]) -> Vec<f64> {
    let stride = xs.len().div_ceil(PLOT_POINTS).max(1);
    xs.iter().step_by(stride).copied().collect()
}

/// Fits the warped-surface couplings from a relaxation energy and barrier,
/// then returns scan cuts and extrema:
/// `{f_mev, g_mev, rho_min, rho_saddle, delta_mev, barrier_mev,
///   radial: {x, lower, upper}, azimuthal: {x, lower, upper}}`.
#[wasm_bindgen]
pub fn jt_surface_json(k_mev: f64, delta_mev: f64, barrier_mev: f64, n_points: u32) -> String {
    let model = match JTModel::fit_from_delta_barrier(k_mev, delta_mev, barrier_mev) {
        Ok(m) => m,
        Err(e) => return err_json(e),
    };
    let ex = model.extrema();
    let n = (n_points as usize).clamp(16, 2001);
    let radial = match model.linear_scan(2.0 * ex.rho_min, n) {
        Ok(s) => s,
        Err(e) => return err_json(e),
    };
    let azimuthal = match model.circular_scan(ex.rho_min, n) {
        Ok(s) => s,
        Err(e) => return err_json(e),
    };
    json!({
        "k_mev": model.k(),
        "f_mev": model.f(),
        "g_mev": model.g(),
        "rho_min": ex.rho_min,
        "rho_saddle": ex.rho_saddle,
        "delta_mev": ex.delta_mev,
        "barrier_mev": ex.barrier_mev,
        "radial": { "x": radial.x, "lower": radial.lower_mev, "upper": radial.upper_mev },
        "azimuthal": { "x": azimuthal.x, "lower": azimuthal.lower_mev, "upper": azimuthal.upper_mev },
    })
    .to_string()
}

/// Emission lineshape for one effective mode with coupling weight `s_total`
/// at energy `omega_mev`, Gaussian sideband broadening `sigma_mev`, and a
/// zero-phonon Lorentzian half-width `gamma_mev`:
/// `{energy_ev, flux, s_total, debye_waller, e_zpl_ev}`. Curves are
/// decimated for plotting; the scalars are exact.
#[wasm_bindgen]
pub fn lineshape_json(
    s_total: f64,
    omega_mev: f64,
    sigma_mev: f64,
    gamma_mev: f64,
    e_zpl_ev: f64,
) -> String {
    if !s_total.is_finite() || s_total < 0.0 {
        return err_json(format!("coupling weight S = {s_total} must be >= 0"));
    }
    if !omega_mev.is_finite() || omega_mev <= 0.0 {
        return err_json(format!("mode energy {omega_mev} meV must be positive"));
    }
    if !gamma_mev.is_finite() || gamma_mev < 0.05 {
        return err_json(format!(
            "line width gamma {gamma_mev} meV is below the demo grid floor of 0.05 meV"
        ));
    }
    // Displacement that reproduces the requested weight; the rest of the
    // chain is exactly the library pipeline the CLI uses.
    let dq = (2.0 * s_total * HBAR_SQ_MEV_AMU_A2 / omega_mev).sqrt();
    let hr = match partial_hr_factors(&[dq], &[omega_mev]) {
        Ok(h) => h,
        Err(e) => return err_json(e),
    };
    let step = gamma_mev.min(0.5);
    let sd = match spectral_density(&hr, 250.0, step, sigma_mev) {
        Ok(s) => s,
        Err(e) => return err_json(e),
    };
    let result = match lineshape(&sd, e_zpl_ev, gamma_mev) {
        Ok(r) => r,
        Err(e) => return err_json(e),
    };
    json!({
        "energy_ev": decimate(&result.energy_ev),
        "flux": decimate(&result.lineshape),
        "s_total": result.s_total,
        "debye_waller": result.debye_waller,
        "e_zpl_ev": result.e_zpl_ev,
    })
    .to_string()
}

/// Stability diagram for a four-state charge ladder (+1, 0, -1, -2) given
/// corrected total energies in eV and the host gap:
/// `{gap_ev, lines: [{q, intercept}], intervals: [{from, to, q}],
///   transitions: [{q_above, q_below, level_ev}], midgap_q}`.
/// Formation-energy lines are `intercept + q * fermi` relative to the
/// common reference, so the page can draw the envelope directly.
#[wasm_bindgen]
pub fn stability_json(
    e_plus1: f64,
    e_neutral: f64,
    e_minus1: f64,
    e_minus2: f64,
    gap_ev: f64,
) -> String {
    let records = vec![
        ChargeStateRecord::new("q+1", 1, e_plus1, 0.0),
        ChargeStateRecord::new("q0", 0, e_neutral, 0.0),
        ChargeStateRecord::new("q-1", -1, e_minus1, 0.0),
        ChargeStateRecord::new("q-2", -2, e_minus2, 0.0),
    ];
    let host = match HostParams::new(gap_ev, 0.0, 5.7, 14.2) {
        Ok(h) => h,
        Err(e) => return err_json(e),
    };
    let diagram = match stability_diagram(&records, &host) {
        Ok(d) => d,
        Err(e) => return err_json(e),
    };
    let lines: Vec<_> = records
        .iter()
        .map(|r| json!({ "q": r.q, "intercept": r.corrected() }))
        .collect();
    let intervals: Vec<_> = diagram
        .intervals
        .iter()
        .map(|iv| json!({ "from": iv.from, "to": iv.to, "q": iv.q }))
        .collect();
    let transitions: Vec<_> = diagram
        .transitions
        .iter()
        .map(|&(qa, qb, e)| json!({ "q_above": qa, "q_below": qb, "level_ev": e }))
        .collect();
    json!({
        "gap_ev": gap_ev,
        "lines": lines,
        "intervals": intervals,
        "transitions": transitions,
        "midgap_q": diagram.stable_charge(gap_ev / 2.0),
    })
    .to_string()
}
