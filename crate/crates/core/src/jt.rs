//! Linear-plus-quadratic E(x)e vibronic coupling: the two-sheet adiabatic
//! potential of a doubly degenerate electronic state coupled to a doubly
//! degenerate mode.
//!
//! In polar coordinates (rho, phi) of the dimensionless mode pair,
//!
//! ```text
//! E_pm(rho, phi) = k rho^2 / 2  pm  rho * sqrt(f^2 + g^2 rho^2 + 2 f g rho cos 3 phi)
//! ```
//!
//! with harmonic stiffness `k`, linear coupling `f`, quadratic coupling `g`
//! (all meV; `rho` dimensionless). The lower sheet has three equivalent
//! minima of depth `delta = f^2 / (2 (k - 2 g))` at `cos 3 phi = 1` and three
//! saddle points between them; the barrier is `delta - f^2 / (2 (k + 2 g))`.
//! The warped-sombrero shape, relaxation energy, and barrier are what
//! pseudorotation and orbital quenching arguments are built on.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum JtError {
    #[error("infeasible surface shape: {0}")]
    InfeasibleFit(String),
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error("radial coordinate {0} out of range")]
    BadRadius(f64),
    #[error("scan needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("gradient undefined on the degeneracy seam (rho = {rho}, phi = {phi})")]
    DegeneratePoint { rho: f64, phi: f64 },
}

/// Two-sheet adiabatic surface of the degenerate coupling problem.
/// Invariants: k > 0, f > 0, g >= 0, and 2 g < k (bound lower sheet).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JTModel {
    k: f64,
    f: f64,
    g: f64,
}

/// Stationary points of the lower sheet. With g = 0 the trough is
/// rotationally flat: no discrete angles and no saddles exist, so the
/// angle-resolved fields are None and the barrier is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct JTExtrema {
    pub rho_min: f64,
    /// Lower-sheet energy at the minima, meV (equals -delta).
    pub e_min_mev: f64,
    /// Relaxation energy from the degenerate point down to a minimum, meV.
    pub delta_mev: f64,
    pub rho_saddle: Option<f64>,
    pub e_saddle_mev: Option<f64>,
    /// Saddle height above the minima, meV.
    pub barrier_mev: f64,
    pub phi_min: Option<[f64; 3]>,
    pub phi_saddle: Option<[f64; 3]>,
}

/// One-dimensional cut through the two sheets, for plotting and fitting.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanCurve {
    /// Name of the scanned coordinate: "rho" or "phi".
    pub coordinate: &'static str,
    pub x: Vec<f64>,
    pub lower_mev: Vec<f64>,
    pub upper_mev: Vec<f64>,
}

impl JTModel {
    pub fn new(k: f64, f: f64, g: f64) -> Result<Self, JtError> {
        if !k.is_finite() || k <= 0.0 {
            return Err(JtError::InvalidParams(format!("stiffness k = {k} meV")));
        }
        if !f.is_finite() || f <= 0.0 {
            return Err(JtError::InvalidParams(format!(
                "linear coupling f = {f} meV"
            )));
        }
        if !g.is_finite() || g < 0.0 {
            return Err(JtError::InvalidParams(format!(
                "quadratic coupling g = {g} meV"
            )));
        }
        if 2.0 * g >= k {
            return Err(JtError::InvalidParams(format!(
                "unbound lower sheet: 2g = {} >= k = {k}",
                2.0 * g
            )));
        }
        Ok(Self { k, f, g })
    }

    /// Recovers couplings from the surface shape: relaxation energy `delta`
    /// and barrier height, both meV, at fixed stiffness `k`.
    ///
    /// Inverting the extremum energies gives
    /// `g = k * barrier / (2 (2 delta - barrier))` and
    /// `f = sqrt(2 delta (k - 2 g))`; feasible iff `delta > barrier >= 0`.
    pub fn fit_from_delta_barrier(k: f64, delta: f64, barrier: f64) -> Result<Self, JtError> {
        if !k.is_finite() || k <= 0.0 {
            return Err(JtError::InvalidParams(format!("stiffness k = {k} meV")));
        }
        if !delta.is_finite() || !barrier.is_finite() || delta <= 0.0 || barrier < 0.0 {
            return Err(JtError::InfeasibleFit(format!(
                "need delta > 0 and barrier >= 0, got delta = {delta}, barrier = {barrier}"
            )));
        }
        if barrier >= delta {
            return Err(JtError::InfeasibleFit(format!(
                "barrier {barrier} meV must stay below the relaxation energy {delta} meV"
            )));
        }
        let g = k * barrier / (2.0 * (2.0 * delta - barrier));
        let f = (2.0 * delta * (k - 2.0 * g)).sqrt();
        Self::new(k, f, g)
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn f(&self) -> f64 {
        self.f
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    /// Relaxation energy of the lower sheet, meV.
    pub fn delta(&self) -> f64 {
        self.f * self.f / (2.0 * (self.k - 2.0 * self.g))
    }

    /// Barrier between adjacent minima, meV.
    pub fn barrier(&self) -> f64 {
        self.delta() - self.f * self.f / (2.0 * (self.k + 2.0 * self.g))
    }

    pub fn rho_min(&self) -> f64 {
        self.f / (self.k - 2.0 * self.g)
    }

    pub fn rho_saddle(&self) -> f64 {
        self.f / (self.k + 2.0 * self.g)
    }

    fn warp(&self, rho: f64, phi: f64) -> f64 {
        let c3 = (3.0 * phi).cos();
        let s2 = self.f * self.f + self.g * self.g * rho * rho + 2.0 * self.f * self.g * rho * c3;
        // Guard tiny negative round-off at the seam.
        s2.max(0.0).sqrt()
    }

    /// Both sheets at one point: (lower, upper) in meV. `rho >= 0`.
    pub fn apes_energy(&self, rho: f64, phi: f64) -> Result<(f64, f64), JtError> {
        if !rho.is_finite() || rho < 0.0 {
            return Err(JtError::BadRadius(rho));
        }
        let harmonic = 0.5 * self.k * rho * rho;
        let split = rho * self.warp(rho, phi);
        Ok((harmonic - split, harmonic + split))
    }

    /// Analytic lower-sheet gradient (d/d rho, d/d phi) in meV. Undefined on
    /// the degeneracy seam where the two sheets touch.
    pub fn apes_gradient_lower(&self, rho: f64, phi: f64) -> Result<(f64, f64), JtError> {
        if !rho.is_finite() || rho < 0.0 {
            return Err(JtError::BadRadius(rho));
        }
        let s = self.warp(rho, phi);
        // Splitting below the cancellation floor of its own terms means the
        // point sits on the seam to working precision; 1/s is then noise.
        let term_scale = self.f + self.g * rho;
        if s <= 1e-6 * term_scale {
            return Err(JtError::DegeneratePoint { rho, phi });
        }
        let c3 = (3.0 * phi).cos();
        let ds_drho = (self.g * self.g * rho + self.f * self.g * c3) / s;
        let d_rho = self.k * rho - s - rho * ds_drho;
        let d_phi = 3.0 * self.f * self.g * rho * rho * (3.0 * phi).sin() / s;
        Ok((d_rho, d_phi))
    }

    /// Stationary points of the lower sheet in closed form.
    pub fn extrema(&self) -> JTExtrema {
        let delta = self.delta();
        let rho_min = self.rho_min();
        if self.g == 0.0 {
            return JTExtrema {
                rho_min,
                e_min_mev: -delta,
                delta_mev: delta,
                rho_saddle: None,
                e_saddle_mev: None,
                barrier_mev: 0.0,
                phi_min: None,
                phi_saddle: None,
            };
        }
        let barrier = self.barrier();
        let third = 2.0 * std::f64::consts::PI / 3.0;
        JTExtrema {
            rho_min,
            e_min_mev: -delta,
            delta_mev: delta,
            rho_saddle: Some(self.rho_saddle()),
            e_saddle_mev: Some(barrier - delta),
            barrier_mev: barrier,
            phi_min: Some([0.0, third, 2.0 * third]),
            phi_saddle: Some([0.5 * third, 1.5 * third, 2.5 * third]),
        }
    }

    /// Radial cut at phi = 0 through both sheets, `n` points on [0, rho_max].
    pub fn linear_scan(&self, rho_max: f64, n: usize) -> Result<ScanCurve, JtError> {
        if n < 2 {
            return Err(JtError::TooFewPoints(n));
        }
        if !rho_max.is_finite() || rho_max <= 0.0 {
            return Err(JtError::BadRadius(rho_max));
        }
        let mut x = Vec::with_capacity(n);
        let mut lower = Vec::with_capacity(n);
        let mut upper = Vec::with_capacity(n);
        for i in 0..n {
            let rho = rho_max * i as f64 / (n - 1) as f64;
            let (lo, up) = self.apes_energy(rho, 0.0)?;
            x.push(rho);
            lower.push(lo);
            upper.push(up);
        }
        Ok(ScanCurve {
            coordinate: "rho",
            x,
            lower_mev: lower,
            upper_mev: upper,
        })
    }

    /// Azimuthal cut at fixed radius through both sheets, `n` points on
    /// [0, 2 pi] including both endpoints.
    pub fn circular_scan(&self, rho: f64, n: usize) -> Result<ScanCurve, JtError> {
        if n < 2 {
            return Err(JtError::TooFewPoints(n));
        }
        if !rho.is_finite() || rho <= 0.0 {
            return Err(JtError::BadRadius(rho));
        }
        let mut x = Vec::with_capacity(n);
        let mut lower = Vec::with_capacity(n);
        let mut upper = Vec::with_capacity(n);
        for i in 0..n {
            let phi = 2.0 * std::f64::consts::PI * i as f64 / (n - 1) as f64;
            let (lo, up) = self.apes_energy(rho, phi)?;
            x.push(phi);
            lower.push(lo);
            upper.push(up);
        }
        Ok(ScanCurve {
            coordinate: "phi",
            x,
            lower_mev: lower,
            upper_mev: upper,
        })
    }
}
