//! Stage runners: each turns a validated config into output tables, a JSON
//! summary for the manifest, and log lines.
//!
//! Error classification drives the exit code: anything wrong with reading or
//! validating inputs is an input error (exit 2), anything the computation
//! itself rejects is a compute error (exit 3).

use anyhow::anyhow;
use defect_photonics::ingest::write_table;
use defect_photonics::*;
use serde_json::json;
use std::path::Path;

pub enum StageError {
    /// Unreadable or invalid inputs; maps to exit code 2.
    Input(anyhow::Error),
    /// The computation rejected the configured physics; maps to exit code 3.
    Compute(anyhow::Error),
}

impl StageError {
    pub fn code(&self) -> u8 {
        match self {
            StageError::Input(_) => 2,
            StageError::Compute(_) => 3,
        }
    }

    pub fn inner(&self) -> &anyhow::Error {
        match self {
            StageError::Input(e) | StageError::Compute(e) => e,
        }
    }
}

fn input<E: std::error::Error + Send + Sync + 'static>(
    context: String,
) -> impl FnOnce(E) -> StageError {
    move |e| StageError::Input(anyhow!(e).context(context))
}

fn compute<E: std::error::Error + Send + Sync + 'static>(
    context: String,
) -> impl FnOnce(E) -> StageError {
    move |e| StageError::Compute(anyhow!(e).context(context))
}

pub struct StageOutcome {
    pub stage: &'static str,
    /// Output files as (name, contents).
    pub files: Vec<(String, String)>,
    pub summary: serde_json::Value,
    pub notes: Vec<String>,
    /// Inputs consumed, as (config-relative path, bytes) for the manifest.
    pub inputs: Vec<(String, Vec<u8>)>,
}

fn read_input(base: &Path, rel: &str) -> Result<(String, Vec<u8>), StageError> {
    let path = base.join(rel);
    let bytes = std::fs::read(&path)
        .map_err(|e| StageError::Input(anyhow!("reading {}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| StageError::Input(anyhow!("{} is not valid UTF-8", path.display())))?;
    Ok((text, bytes))
}

/// Charge stage: transition levels and the stability diagram.
pub fn run_ctl(cfg: &PipelineConfig, base: &Path) -> Result<StageOutcome, StageError> {
    let section = cfg
        .charge
        .as_ref()
        .ok_or_else(|| StageError::Input(anyhow!("config has no [charge] section")))?;
    let host = cfg.host_params().map_err(input("host parameters".into()))?;
    let (text, bytes) = read_input(base, &section.records)?;
    let mut records =
        parse_charge_records(&text).map_err(input(format!("parsing {}", section.records)))?;
    if section.use_builtin_correction {
        for r in &mut records {
            r.e_corr = point_charge_correction(r.q, &host)
                .map_err(compute("monopole correction".into()))?;
        }
    }

    let diagram =
        stability_diagram(&records, &host).map_err(compute("stability diagram".into()))?;

    let level_rows: Vec<Vec<f64>> = diagram
        .transitions
        .iter()
        .map(|&(qa, qb, eps)| vec![f64::from(qa), f64::from(qb), eps])
        .collect();
    let interval_rows: Vec<Vec<f64>> = diagram
        .intervals
        .iter()
        .map(|iv| vec![iv.from, iv.to, f64::from(iv.q)])
        .collect();
    let levels_csv = write_table(&["q_above", "q_below", "level_eV"], &level_rows)
        .map_err(compute("writing transition levels".into()))?;
    let intervals_csv = write_table(&["from_eV", "to_eV", "q"], &interval_rows)
        .map_err(compute("writing stability intervals".into()))?;

    let midgap_q = diagram.stable_charge(host.midgap());
    let summary = json!({
        "records": records.len(),
        "intervals": diagram.intervals.len(),
        "transitions": diagram.transitions.len(),
        "stable_at_midgap": midgap_q,
        "builtin_correction": section.use_builtin_correction,
    });
    let notes = vec![format!(
        "[ctl] {} charge states -> {} stable intervals, midgap charge q = {}",
        records.len(),
        diagram.intervals.len(),
        midgap_q.map_or("none".into(), |q| q.to_string()),
    )];
    Ok(StageOutcome {
        stage: "ctl",
        files: vec![
            ("transition_levels.csv".into(), levels_csv),
            ("stability_intervals.csv".into(), intervals_csv),
        ],
        summary,
        notes,
        inputs: vec![(section.records.clone(), bytes)],
    })
}

/// Degenerate-coupling stage: surface fit or direct couplings, extrema, and
/// the two scan cuts.
pub fn run_jt(cfg: &PipelineConfig) -> Result<StageOutcome, StageError> {
    let section = cfg
        .jt
        .as_ref()
        .ok_or_else(|| StageError::Input(anyhow!("config has no [jt] section")))?;
    let (model, fitted) = match (section.delta_mev, section.barrier_mev) {
        (Some(delta), Some(barrier)) => (
            JTModel::fit_from_delta_barrier(section.k_mev, delta, barrier)
                .map_err(compute("surface fit".into()))?,
            true,
        ),
        _ => {
            let f = section.f_mev_per_q.expect("config validation");
            let g = section.g_mev_per_q2.expect("config validation");
            (
                JTModel::new(section.k_mev, f, g).map_err(compute("surface parameters".into()))?,
                false,
            )
        }
    };
    let ex = model.extrema();
    let rho_max = section.rho_max.unwrap_or(2.0 * ex.rho_min);
    let radial = model
        .linear_scan(rho_max, section.scan_points)
        .map_err(compute("radial scan".into()))?;
    let azimuthal = model
        .circular_scan(ex.rho_min, section.scan_points)
        .map_err(compute("azimuthal scan".into()))?;

    let scan_rows = |scan: &ScanCurve| -> Vec<Vec<f64>> {
        scan.x
            .iter()
            .zip(scan.lower_mev.iter().zip(&scan.upper_mev))
            .map(|(&x, (&lo, &up))| vec![x, lo, up])
            .collect()
    };
    let radial_csv = write_table(&["rho", "e_lower_meV", "e_upper_meV"], &scan_rows(&radial))
        .map_err(compute("writing radial scan".into()))?;
    let azimuthal_csv = write_table(
        &["phi_rad", "e_lower_meV", "e_upper_meV"],
        &scan_rows(&azimuthal),
    )
    .map_err(compute("writing azimuthal scan".into()))?;

    // Flat-trough surfaces (g = 0) have no saddle; the saddle columns then
    // repeat the minimum, consistent with a zero barrier.
    let extrema_row = vec![
        model.k(),
        model.f(),
        model.g(),
        ex.delta_mev,
        ex.barrier_mev,
        ex.rho_min,
        ex.rho_saddle.unwrap_or(ex.rho_min),
        ex.e_min_mev,
        ex.e_saddle_mev.unwrap_or(ex.e_min_mev),
    ];
    let extrema_csv = write_table(
        &[
            "k_meV",
            "f_meV",
            "g_meV",
            "delta_meV",
            "barrier_meV",
            "rho_min",
            "rho_saddle",
            "e_min_meV",
            "e_saddle_meV",
        ],
        &[extrema_row],
    )
    .map_err(compute("writing extrema".into()))?;

    let summary = json!({
        "fitted": fitted,
        "k_mev": model.k(),
        "f_mev": model.f(),
        "g_mev": model.g(),
        "delta_mev": ex.delta_mev,
        "barrier_mev": ex.barrier_mev,
        "rho_min": ex.rho_min,
    });
    let notes = vec![
        if fitted {
            format!(
                "[jt] fitted couplings: f = {:.6} meV, g = {:.6} meV at k = {} meV",
                model.f(),
                model.g(),
                model.k()
            )
        } else {
            format!(
                "[jt] direct couplings: f = {} meV, g = {} meV at k = {} meV",
                model.f(),
                model.g(),
                model.k()
            )
        },
        format!(
            "[jt] relaxation {:.6} meV, barrier {:.6} meV, rho_min {:.6}",
            ex.delta_mev, ex.barrier_mev, ex.rho_min
        ),
    ];
    Ok(StageOutcome {
        stage: "jt",
        files: vec![
            ("jt_radial_scan.csv".into(), radial_csv),
            ("jt_azimuthal_scan.csv".into(), azimuthal_csv),
            ("jt_extrema.csv".into(), extrema_csv),
        ],
        summary,
        notes,
        inputs: Vec::new(),
    })
}

/// Lineshape stage: geometries and modes to spectral density and emission.
pub fn run_lineshape(cfg: &PipelineConfig, base: &Path) -> Result<StageOutcome, StageError> {
    let section = cfg
        .lineshape
        .as_ref()
        .ok_or_else(|| StageError::Input(anyhow!("config has no [lineshape] section")))?;
    let (ground_text, ground_bytes) = read_input(base, &section.ground)?;
    let (excited_text, excited_bytes) = read_input(base, &section.excited)?;
    let (modes_text, modes_bytes) = read_input(base, &section.modes)?;
    let ground =
        parse_structure(&ground_text).map_err(input(format!("parsing {}", section.ground)))?;
    let excited =
        parse_structure(&excited_text).map_err(input(format!("parsing {}", section.excited)))?;
    let modes =
        parse_phonons(&modes_text, &ground).map_err(input(format!("parsing {}", section.modes)))?;

    let dq = mode_displacements(&ground, &excited, &modes)
        .map_err(compute("projecting displacements".into()))?;
    let hr = partial_hr_factors(&dq, modes.frequencies_mev())
        .map_err(compute("coupling weights".into()))?;
    let sd = spectral_density(
        &hr,
        section.grid_max_mev,
        section.grid_step_mev,
        section.sigma_mev,
    )
    .map_err(compute("spectral density".into()))?;
    let result = lineshape(&sd, section.zpl_ev(), section.gamma_mev)
        .map_err(compute("emission lineshape".into()))?;

    let sd_rows: Vec<Vec<f64>> = sd
        .grid_mev()
        .iter()
        .zip(sd.values())
        .map(|(&e, &v)| vec![e, v])
        .collect();
    let emission_rows: Vec<Vec<f64>> = result
        .energy_ev
        .iter()
        .zip(&result.intensity_per_ev)
        .map(|(&e, &v)| vec![e, v])
        .collect();
    let flux_rows: Vec<Vec<f64>> = result
        .energy_ev
        .iter()
        .zip(&result.lineshape)
        .map(|(&e, &v)| vec![e, v])
        .collect();
    let sd_csv = write_table(&["energy_meV", "density_per_meV"], &sd_rows)
        .map_err(compute("writing spectral density".into()))?;
    let emission_csv = write_table(&["energy_eV", "intensity_per_eV"], &emission_rows)
        .map_err(compute("writing emission".into()))?;
    let flux_csv = write_table(&["energy_eV", "flux_normalized"], &flux_rows)
        .map_err(compute("writing lineshape".into()))?;

    let peak_idx = result
        .lineshape
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let summary = json!({
        "modes": modes.len(),
        "s_total": result.s_total,
        "debye_waller": result.debye_waller,
        "e_zpl_ev": result.e_zpl_ev,
        "peak_ev": result.energy_ev[peak_idx],
    });
    let notes = vec![format!(
        "[lineshape] {} modes, S = {:.6}, zero-phonon weight = {:.6}",
        modes.len(),
        result.s_total,
        result.debye_waller
    )];
    Ok(StageOutcome {
        stage: "lineshape",
        files: vec![
            ("spectral_density.csv".into(), sd_csv),
            ("emission.csv".into(), emission_csv),
            ("lineshape.csv".into(), flux_csv),
        ],
        summary,
        notes,
        inputs: vec![
            (section.ground.clone(), ground_bytes),
            (section.excited.clone(), excited_bytes),
            (section.modes.clone(), modes_bytes),
        ],
    })
}
