//! Zero-temperature emission lineshape from the cumulant generating function.
//!
//! With spectral density `S(eps)` and total weight `S`, the generating
//! function along the time axis is
//!
//! ```text
//! G(tau) = exp( integral S(eps) e^{-i eps tau} d eps - S ) * e^{-gamma |tau|}
//! ```
//!
//! and the normalized emission function is its Fourier transform evaluated at
//! the offset below the zero-phonon energy. The Lorentzian factor gives the
//! zero-phonon line a finite width `gamma`. Everything is discretized on the
//! spectral-density grid and evaluated with FFTs; the time grid is the
//! conjugate grid, zero-padded eightfold so the multi-phonon tail and the
//! line tails have room before the transform wraps.

use super::{debye_waller, SpectralFunction, VibronicError};
use crate::units::MEV_PER_EV;
use rustfft::{num_complex::Complex, FftPlanner};

/// Windowed emission spectrum on a photon-energy grid bracketing the
/// zero-phonon energy.
#[derive(Debug, Clone, PartialEq)]
pub struct LineshapeResult {
    /// Ascending photon energies, eV.
    pub energy_ev: Vec<f64>,
    /// Normalized emission function A(E), 1/eV; unit Riemann integral over
    /// the window.
    pub intensity_per_ev: Vec<f64>,
    /// Photon-flux lineshape `E^3 A(E)`, scaled to unit peak.
    pub lineshape: Vec<f64>,
    /// Total coupling weight (integral of the spectral density).
    pub s_total: f64,
    /// Zero-phonon-line weight `exp(-s_total)`.
    pub debye_waller: f64,
    pub e_zpl_ev: f64,
}

pub(super) struct Window {
    pub n_fft: usize,
    /// Window cells below the zero-phonon line (multi-phonon side).
    pub j_below: usize,
    /// Window cells above it (line tail only at zero temperature).
    pub j_above: usize,
}

/// FFT length and output window for a density sampled on `n_points` cells.
/// The window keeps four sideband spans below the line and one above, clipped
/// to positive photon energies.
pub(super) fn plan_window(
    n_points: usize,
    e_zpl_mev: f64,
    step: f64,
) -> Result<Window, VibronicError> {
    let n_fft = (8 * n_points).next_power_of_two();
    let positive_cells = ((e_zpl_mev - step) / step).floor().max(0.0) as usize;
    let j_below = (4 * n_points).min(n_fft / 2).min(positive_cells);
    if j_below < n_points {
        return Err(VibronicError::InvalidGrid(format!(
            "zero-phonon energy {e_zpl_mev} meV leaves no room for a sideband spanning {} meV",
            n_points as f64 * step
        )));
    }
    let j_above = n_points.min(n_fft / 2 - 1);
    Ok(Window {
        n_fft,
        j_below,
        j_above,
    })
}

/// Emission spectrum for a spectral density, zero-phonon energy (eV), and
/// zero-phonon Lorentzian half-width `gamma` (meV).
///
/// The density grid must start at zero energy, and its step must not exceed
/// `gamma`: otherwise the conjugate time window ends before the line has
/// decayed and the transform aliases.
pub fn lineshape(
    sd: &SpectralFunction,
    e_zpl_ev: f64,
    gamma_mev: f64,
) -> Result<LineshapeResult, VibronicError> {
    if !e_zpl_ev.is_finite() || e_zpl_ev <= 0.0 {
        return Err(VibronicError::NonPositiveZpl(e_zpl_ev));
    }
    if !gamma_mev.is_finite() || gamma_mev <= 0.0 {
        return Err(VibronicError::InvalidGrid(format!(
            "line width gamma {gamma_mev} meV"
        )));
    }
    let step = sd.step();
    if step > gamma_mev {
        return Err(VibronicError::NyquistViolation {
            step,
            gamma: gamma_mev,
        });
    }
    if sd.grid_mev()[0].abs() > 1e-9 * step {
        return Err(VibronicError::InvalidGrid(format!(
            "spectral density grid must start at zero, starts at {} meV",
            sd.grid_mev()[0]
        )));
    }

    let e_zpl_mev = e_zpl_ev * MEV_PER_EV;
    let win = plan_window(sd.len(), e_zpl_mev, step)?;
    let n = win.n_fft;

    // Forward transform of the padded density gives the cumulant S~(tau_i)
    // on tau_i = 2 pi i / (n * step); entry 0 is the total weight.
    let mut buf: Vec<Complex<f64>> = sd
        .values()
        .iter()
        .map(|&v| Complex::new(v * step, 0.0))
        .collect();
    buf.resize(n, Complex::new(0.0, 0.0));
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let s_total = buf[0].re;

    // Generating function with the line decay at the minimal-image |tau|,
    // keeping the array Hermitian so the spectrum comes out real.
    let dtau = 2.0 * std::f64::consts::PI / (n as f64 * step);
    for (i, b) in buf.iter_mut().enumerate() {
        let tau_abs = i.min(n - i) as f64 * dtau;
        let damp = (-gamma_mev * tau_abs).exp();
        *b = (*b - Complex::new(s_total, 0.0)).exp() * damp;
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / (n as f64 * step);

    // Window assembly: offset j cells below the line lives at buf[j], k cells
    // above it at buf[n - k].
    let total = win.j_below + win.j_above + 1;
    let mut energy_ev = Vec::with_capacity(total);
    let mut raw = Vec::with_capacity(total);
    for i in 0..total {
        let offset = i as isize - win.j_below as isize;
        let a = if offset <= 0 {
            buf[(-offset) as usize].re
        } else {
            buf[n - offset as usize].re
        } * scale;
        energy_ev.push((e_zpl_mev + offset as f64 * step) / MEV_PER_EV);
        raw.push(a);
    }

    let peak = raw.iter().cloned().fold(0.0f64, f64::max);
    if peak <= 0.0 {
        return Err(VibronicError::InvalidGrid(
            "emission window holds no weight".into(),
        ));
    }
    for (i, v) in raw.iter_mut().enumerate() {
        if *v < -1e-12 * peak {
            return Err(VibronicError::NegativeValue {
                index: i,
                value: *v,
            });
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let mass = raw.iter().sum::<f64>() * step;
    let intensity_per_ev: Vec<f64> = raw.iter().map(|v| v / mass * MEV_PER_EV).collect();

    let mut lineshape: Vec<f64> = energy_ev
        .iter()
        .zip(&intensity_per_ev)
        .map(|(e, a)| e * e * e * a)
        .collect();
    let lpeak = lineshape.iter().cloned().fold(0.0f64, f64::max);
    for v in &mut lineshape {
        *v /= lpeak;
    }

    Ok(LineshapeResult {
        energy_ev,
        intensity_per_ev,
        lineshape,
        s_total,
        debye_waller: debye_waller(s_total)?,
        e_zpl_ev,
    })
}
