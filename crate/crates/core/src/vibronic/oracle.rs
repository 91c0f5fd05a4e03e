//! Reference emission spectrum from an explicit Franck-Condon sum.
//!
//! For a handful of modes the zero-temperature spectrum can be written
//! directly: each mode contributes a truncated Poisson progression
//!
//! ```text
//! sum_m  e^{-S_k} S_k^m / m!   at offset m * omega_k
//! ```
//!
//! and the total spectrum is the convolution of the per-mode progressions
//! with the broadened line. This file evaluates that product in the time
//! domain, term by term, without ever forming the cumulant exponential, so it
//! is an independent cross-check of the generating-function route: the two
//! must agree to numerical precision wherever the truncation keeps
//! essentially all the weight.

use super::lineshape::plan_window;
use super::{SpectralFunction, VibronicError};
use crate::units::MEV_PER_EV;
use rustfft::{num_complex::Complex, FftPlanner};

/// Maximum mode count the explicit sum accepts.
const MODE_LIMIT: usize = 4;
/// Minimum per-mode weight the truncated progression must retain.
const RETAIN_FLOOR: f64 = 1.0 - 1e-8;

/// Explicit Franck-Condon spectrum for up to four modes given as
/// `(omega_meV, S_k)` pairs, on the same photon window the
/// generating-function route produces for the same grid parameters.
/// Gaussian phonon broadening `sigma`, Lorentzian line width `gamma`,
/// progressions truncated at `max_quanta` quanta per mode.
#[allow(clippy::too_many_arguments)]
pub fn fc_oracle(
    modes: &[(f64, f64)],
    e_zpl_ev: f64,
    grid_max_mev: f64,
    grid_step_mev: f64,
    sigma_mev: f64,
    gamma_mev: f64,
    max_quanta: usize,
) -> Result<SpectralFunction, VibronicError> {
    if modes.len() > MODE_LIMIT {
        return Err(VibronicError::TooManyModes(modes.len()));
    }
    for (k, &(w, s)) in modes.iter().enumerate() {
        if !w.is_finite() || w <= 0.0 {
            return Err(VibronicError::BadOracleMode(
                k,
                format!("frequency {w} meV"),
            ));
        }
        if !s.is_finite() || s < 0.0 {
            return Err(VibronicError::NegativeWeight(k, s));
        }
    }
    if !e_zpl_ev.is_finite() || e_zpl_ev <= 0.0 {
        return Err(VibronicError::NonPositiveZpl(e_zpl_ev));
    }
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
    if !gamma_mev.is_finite() || gamma_mev <= 0.0 {
        return Err(VibronicError::InvalidGrid(format!(
            "line width gamma {gamma_mev} meV"
        )));
    }
    if grid_step_mev > gamma_mev {
        return Err(VibronicError::NyquistViolation {
            step: grid_step_mev,
            gamma: gamma_mev,
        });
    }
    if max_quanta == 0 {
        return Err(VibronicError::InvalidGrid(
            "max_quanta must be at least 1".into(),
        ));
    }
    for (k, &(_, s)) in modes.iter().enumerate() {
        let mut term = (-s).exp();
        let mut retained = term;
        for m in 1..=max_quanta {
            term *= s / m as f64;
            retained += term;
        }
        if retained < RETAIN_FLOOR {
            return Err(VibronicError::TruncationTooCoarse {
                index: k,
                max_quanta,
                retained,
            });
        }
    }

    let m_cells = (grid_max_mev / grid_step_mev).round() as usize;
    if m_cells < 2 {
        return Err(VibronicError::InvalidGrid(
            "grid resolves fewer than 3 points".into(),
        ));
    }
    let step = grid_step_mev;
    let e_zpl_mev = e_zpl_ev * MEV_PER_EV;
    let win = plan_window(m_cells + 1, e_zpl_mev, step)?;
    let n = win.n_fft;

    // Time-domain product of the truncated per-mode progressions. The signed
    // minimal-image time keeps the array Hermitian so the spectrum is real.
    let dtau = 2.0 * std::f64::consts::PI / (n as f64 * step);
    let mut buf: Vec<Complex<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        let signed = if i <= n / 2 {
            i as f64
        } else {
            i as f64 - n as f64
        };
        let tau = signed * dtau;
        let tau_abs = tau.abs();
        let mut g = Complex::new((-gamma_mev * tau_abs).exp(), 0.0);
        for &(w, s) in modes {
            // One broadened quantum in the time domain.
            let z = Complex::new(-0.5 * sigma_mev * sigma_mev * tau * tau, -w * tau).exp();
            let mut term = Complex::new((-s).exp(), 0.0);
            let mut sum = term;
            for m in 1..=max_quanta {
                term = term * z * (s / m as f64);
                sum += term;
            }
            g *= sum;
        }
        buf.push(g);
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / (n as f64 * step);

    let total = win.j_below + win.j_above + 1;
    let mut grid = Vec::with_capacity(total);
    let mut vals = Vec::with_capacity(total);
    for i in 0..total {
        let offset = i as isize - win.j_below as isize;
        let a = if offset <= 0 {
            buf[(-offset) as usize].re
        } else {
            buf[n - offset as usize].re
        } * scale;
        grid.push(e_zpl_mev + offset as f64 * step);
        vals.push(a);
    }
    let peak = vals.iter().cloned().fold(0.0f64, f64::max);
    if peak <= 0.0 {
        return Err(VibronicError::InvalidGrid(
            "oracle window holds no weight".into(),
        ));
    }
    for v in &mut vals {
        if *v < 0.0 && *v >= -1e-12 * peak {
            *v = 0.0;
        }
    }
    let mass = vals.iter().sum::<f64>() * step;
    for v in &mut vals {
        *v /= mass;
    }
    SpectralFunction::new(grid, vals)
}
