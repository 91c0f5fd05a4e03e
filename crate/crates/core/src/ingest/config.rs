//! Pipeline configuration (TOML).
//!
//! ```toml
//! # host crystal; values below are the diamond defaults
//! [host]
//! gap_ev = 5.47
//! e_vbm_ev = 0.0
//! eps_r = 5.7
//! cell_length_a = 14.2
//!
//! # charge-level stage (optional)
//! [charge]
//! records = "xv_ctl.csv"
//! use_builtin_correction = false
//!
//! # Jahn-Teller stage (optional): give either the surface parameters
//! # (delta_mev, barrier_mev) to fit, or the couplings directly
//! # (f_mev_per_q, g_mev_per_q2)
//! [jt]
//! k_mev = 318.0
//! delta_mev = 236.0
//! barrier_mev = 71.0
//! scan_points = 241
//!
//! # emission lineshape stage (optional): the zero-phonon energy comes
//! # either directly (e_zpl_ev) or as a difference of total energies
//! # (e_tot_excited_ev - e_tot_ground_ev)
//! [lineshape]
//! ground = "ground.xyz"
//! excited = "excited.xyz"
//! modes = "modes.phn"
//! e_zpl_ev = 1.82
//! grid_step_mev = 0.1
//! grid_max_mev = 250.0
//! sigma_mev = 3.0
//! gamma_mev = 1.0
//! ```
//!
//! Unknown keys anywhere are errors. File paths are resolved relative to the
//! config file by the caller.

use super::IngestError;
use crate::model::{HostParams, ModelError};
use serde::{Deserialize, Serialize};

fn default_gap() -> f64 {
    5.47
}
fn default_eps_r() -> f64 {
    5.7
}
fn default_cell() -> f64 {
    14.2
}
fn default_scan_points() -> usize {
    241
}
fn default_grid_step() -> f64 {
    0.1
}
fn default_grid_max() -> f64 {
    250.0
}
fn default_sigma() -> f64 {
    3.0
}
fn default_gamma() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct HostSection {
    #[serde(default = "default_gap")]
    pub gap_ev: f64,
    #[serde(default)]
    pub e_vbm_ev: f64,
    #[serde(default = "default_eps_r")]
    pub eps_r: f64,
    #[serde(default = "default_cell")]
    pub cell_length_a: f64,
}

impl Default for HostSection {
    fn default() -> Self {
        Self {
            gap_ev: default_gap(),
            e_vbm_ev: 0.0,
            eps_r: default_eps_r(),
            cell_length_a: default_cell(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ChargeSection {
    /// Path to the charge-state CSV.
    pub records: String,
    /// Replace each record's correction with the built-in monopole estimate.
    #[serde(default)]
    pub use_builtin_correction: bool,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct JtSection {
    /// Harmonic force constant of the degenerate mode pair, meV per unit
    /// dimensionless coordinate squared. Always required.
    pub k_mev: f64,
    pub delta_mev: Option<f64>,
    pub barrier_mev: Option<f64>,
    pub f_mev_per_q: Option<f64>,
    pub g_mev_per_q2: Option<f64>,
    #[serde(default = "default_scan_points")]
    pub scan_points: usize,
    /// Radial scan extent; defaults to twice the minimum radius.
    pub rho_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct LineshapeSection {
    pub ground: String,
    pub excited: String,
    pub modes: String,
    /// Zero-phonon energy given directly; exclusive with the total-energy
    /// pair below.
    pub e_zpl_ev: Option<f64>,
    /// Excited- and ground-state total energies; the zero-phonon energy is
    /// their difference.
    pub e_tot_excited_ev: Option<f64>,
    pub e_tot_ground_ev: Option<f64>,
    #[serde(default = "default_grid_step")]
    pub grid_step_mev: f64,
    #[serde(default = "default_grid_max")]
    pub grid_max_mev: f64,
    #[serde(default = "default_sigma")]
    pub sigma_mev: f64,
    #[serde(default = "default_gamma")]
    pub gamma_mev: f64,
}

impl LineshapeSection {
    /// Effective zero-phonon energy: direct value or total-energy difference.
    /// `parse_config` guarantees exactly one of the two forms is present.
    pub fn zpl_ev(&self) -> f64 {
        match (self.e_zpl_ev, self.e_tot_excited_ev, self.e_tot_ground_ev) {
            (Some(z), _, _) => z,
            (None, Some(ex), Some(g)) => ex - g,
            _ => f64::NAN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub host: HostSection,
    pub charge: Option<ChargeSection>,
    pub jt: Option<JtSection>,
    pub lineshape: Option<LineshapeSection>,
}

impl PipelineConfig {
    /// Validated host parameters for this run.
    pub fn host_params(&self) -> Result<HostParams, ModelError> {
        HostParams::new(
            self.host.gap_ev,
            self.host.e_vbm_ev,
            self.host.eps_r,
            self.host.cell_length_a,
        )
    }
}

fn check(cond: bool, msg: &str) -> Result<(), IngestError> {
    if cond {
        Ok(())
    } else {
        Err(IngestError::Config(msg.to_string()))
    }
}

/// Parses and structurally validates a pipeline configuration. Physics-level
/// feasibility (surface shapes, sampling limits) is checked by the stages
/// themselves; this layer rejects malformed and self-contradictory files.
pub fn parse_config(text: &str) -> Result<PipelineConfig, IngestError> {
    let cfg: PipelineConfig =
        toml::from_str(text).map_err(|e| IngestError::Config(e.to_string()))?;

    cfg.host_params()?;

    if let Some(charge) = &cfg.charge {
        check(!charge.records.is_empty(), "charge.records path is empty")?;
    }
    if let Some(jt) = &cfg.jt {
        check(
            jt.k_mev.is_finite() && jt.k_mev > 0.0,
            "jt.k_mev must be positive",
        )?;
        let shape = jt.delta_mev.is_some() || jt.barrier_mev.is_some();
        let shape_full = jt.delta_mev.is_some() && jt.barrier_mev.is_some();
        let coupling = jt.f_mev_per_q.is_some() || jt.g_mev_per_q2.is_some();
        let coupling_full = jt.f_mev_per_q.is_some() && jt.g_mev_per_q2.is_some();
        check(
            !(shape && coupling),
            "jt: give either (delta_mev, barrier_mev) or (f_mev_per_q, g_mev_per_q2), not both",
        )?;
        check(
            (shape && shape_full) || (coupling && coupling_full),
            "jt: needs both of (delta_mev, barrier_mev) or both of (f_mev_per_q, g_mev_per_q2)",
        )?;
        check(jt.scan_points >= 2, "jt.scan_points must be at least 2")?;
        if let Some(r) = jt.rho_max {
            check(r.is_finite() && r > 0.0, "jt.rho_max must be positive")?;
        }
    }
    if let Some(ls) = &cfg.lineshape {
        check(!ls.ground.is_empty(), "lineshape.ground path is empty")?;
        check(!ls.excited.is_empty(), "lineshape.excited path is empty")?;
        check(!ls.modes.is_empty(), "lineshape.modes path is empty")?;
        let direct = ls.e_zpl_ev.is_some();
        let totals_any = ls.e_tot_excited_ev.is_some() || ls.e_tot_ground_ev.is_some();
        let totals_full = ls.e_tot_excited_ev.is_some() && ls.e_tot_ground_ev.is_some();
        check(
            !(direct && totals_any),
            "lineshape: give either e_zpl_ev or (e_tot_excited_ev, e_tot_ground_ev), not both",
        )?;
        check(
            direct || totals_full,
            "lineshape: needs e_zpl_ev or both of (e_tot_excited_ev, e_tot_ground_ev)",
        )?;
        check(
            ls.zpl_ev().is_finite() && ls.zpl_ev() > 0.0,
            "lineshape: zero-phonon energy must be positive (excited above ground)",
        )?;
        check(
            ls.grid_step_mev.is_finite() && ls.grid_step_mev > 0.0,
            "lineshape.grid_step_mev must be positive",
        )?;
        check(
            ls.grid_max_mev.is_finite() && ls.grid_max_mev > ls.grid_step_mev,
            "lineshape.grid_max_mev must exceed grid_step_mev",
        )?;
        check(
            ls.sigma_mev.is_finite() && ls.sigma_mev > 0.0,
            "lineshape.sigma_mev must be positive",
        )?;
        check(
            ls.gamma_mev.is_finite() && ls.gamma_mev > 0.0,
            "lineshape.gamma_mev must be positive",
        )?;
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r#"
[host]
gap_ev = 5.47
eps_r = 5.7

[charge]
records = "xv_ctl.csv"

[jt]
k_mev = 318.0
delta_mev = 236.0
barrier_mev = 71.0

[lineshape]
ground = "ground.xyz"
excited = "excited.xyz"
modes = "modes.phn"
e_zpl_ev = 1.82
"#;

    #[test]
    fn parses_full_config_with_defaults() {
        let cfg = parse_config(FULL).unwrap();
        assert_eq!(cfg.host.cell_length_a, 14.2);
        assert_eq!(cfg.host.e_vbm_ev, 0.0);
        let jt = cfg.jt.unwrap();
        assert_eq!(jt.scan_points, 241);
        assert_eq!(jt.delta_mev, Some(236.0));
        let ls = cfg.lineshape.unwrap();
        assert_eq!(ls.grid_step_mev, 0.1);
        assert_eq!(ls.grid_max_mev, 250.0);
        assert_eq!(ls.sigma_mev, 3.0);
        assert_eq!(ls.gamma_mev, 1.0);
        assert!(!cfg.charge.unwrap().use_builtin_correction);
    }

    #[test]
    fn host_defaults_when_section_missing() {
        let cfg = parse_config("[charge]\nrecords = \"a.csv\"\n").unwrap();
        let host = cfg.host_params().unwrap();
        assert_eq!(host.gap(), 5.47);
        assert_eq!(host.eps_r(), 5.7);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(
            parse_config("[host]\nga_ev = 5.0\n"),
            Err(IngestError::Config(_))
        ));
        assert!(matches!(
            parse_config("[novel]\nx = 1\n"),
            Err(IngestError::Config(_))
        ));
    }

    #[test]
    fn jt_parameterization_is_exclusive() {
        let half = "[jt]\nk_mev = 318.0\ndelta_mev = 236.0\n";
        assert!(matches!(parse_config(half), Err(IngestError::Config(_))));
        let both = "[jt]\nk_mev = 318.0\ndelta_mev = 236.0\nbarrier_mev = 71.0\nf_mev_per_q = 197.0\ng_mev_per_q2 = 8.85\n";
        assert!(matches!(parse_config(both), Err(IngestError::Config(_))));
        let none = "[jt]\nk_mev = 318.0\n";
        assert!(matches!(parse_config(none), Err(IngestError::Config(_))));
        let couplings = "[jt]\nk_mev = 318.0\nf_mev_per_q = 197.0\ng_mev_per_q2 = 8.85\n";
        assert!(parse_config(couplings).is_ok());
    }

    #[test]
    fn zpl_from_total_energy_difference() {
        let base = "[lineshape]\nground = \"g\"\nexcited = \"e\"\nmodes = \"m\"\n";
        let totals = format!("{base}e_tot_excited_ev = -98.18\ne_tot_ground_ev = -100.0\n");
        let cfg = parse_config(&totals).unwrap();
        let zpl = cfg.lineshape.unwrap().zpl_ev();
        assert!((zpl - 1.82).abs() < 1e-12);

        let both = format!("{totals}e_zpl_ev = 1.82\n");
        assert!(matches!(parse_config(&both), Err(IngestError::Config(_))));
        let half = format!("{base}e_tot_excited_ev = -98.18\n");
        assert!(matches!(parse_config(&half), Err(IngestError::Config(_))));
        let neither = base.to_string();
        assert!(matches!(
            parse_config(&neither),
            Err(IngestError::Config(_))
        ));
        let inverted = format!("{base}e_tot_excited_ev = -100.0\ne_tot_ground_ev = -98.18\n");
        assert!(matches!(
            parse_config(&inverted),
            Err(IngestError::Config(_))
        ));
    }

    #[test]
    fn numeric_guards() {
        assert!(parse_config("[host]\ngap_ev = -1.0\n").is_err());
        assert!(parse_config("[host]\neps_r = 0.9\n").is_err());
        let bad_sigma = "[lineshape]\nground = \"g\"\nexcited = \"e\"\nmodes = \"m\"\ne_zpl_ev = 1.82\nsigma_mev = 0.0\n";
        assert!(parse_config(bad_sigma).is_err());
        let bad_grid = "[lineshape]\nground = \"g\"\nexcited = \"e\"\nmodes = \"m\"\ne_zpl_ev = 1.82\ngrid_max_mev = 0.05\n";
        assert!(parse_config(bad_grid).is_err());
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = parse_config(FULL).unwrap();
        let text = toml::to_string(&cfg).unwrap();
        let cfg2 = parse_config(&text).unwrap();
        assert_eq!(cfg, cfg2);
    }
}
