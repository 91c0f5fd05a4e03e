//! Command-line front end for the defect-photonics pipeline.
//!
//! Exit codes: 0 on success, 2 for input problems (missing or malformed
//! files, bad configuration, usage errors), 3 when a stage rejects the
//! configured physics (infeasible surface fit, undersampled line, ...).

mod commands;
mod manifest;

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand};
use commands::{run_ctl, run_jt, run_lineshape, StageError, StageOutcome};
use defect_photonics::parse_config;
use manifest::RunManifest;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "defect-photonics",
    version,
    about = "Color-center observables from first-principles defect data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Pipeline configuration (TOML); input paths inside it resolve relative
    /// to its directory
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory, created if missing (default: $DEFECT_PHOTONICS_OUT,
    /// else the current directory)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Charge transition levels and the stability diagram
    Ctl(CommonArgs),
    /// Degenerate-mode surface: coupling fit, extrema, and scan cuts
    Jt(CommonArgs),
    /// Vibronic emission lineshape from geometries and modes
    Lineshape(CommonArgs),
    /// Every stage the config defines, plus a combined manifest
    All(CommonArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Ctl(_) => "ctl",
            Command::Jt(_) => "jt",
            Command::Lineshape(_) => "lineshape",
            Command::All(_) => "all",
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::Ctl(a) | Command::Jt(a) | Command::Lineshape(a) | Command::All(a) => a,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {:#}", err.inner());
            ExitCode::from(err.code())
        }
    }
}

fn run(command: &Command) -> Result<(), StageError> {
    let args = command.args();
    let config_bytes = std::fs::read(&args.config)
        .map_err(|e| StageError::Input(anyhow!("reading {}: {e}", args.config.display())))?;
    let config_text = String::from_utf8(config_bytes.clone())
        .map_err(|_| StageError::Input(anyhow!("{} is not valid UTF-8", args.config.display())))?;
    let cfg = parse_config(&config_text).map_err(|e| {
        StageError::Input(anyhow!(e).context(format!("parsing {}", args.config.display())))
    })?;
    // parent() of a bare filename is Some(""), which join() treats as the
    // current directory.
    let base = args.config.parent().unwrap_or(std::path::Path::new("."));

    let stages: Vec<&'static str> = match command {
        Command::Ctl(_) => vec!["ctl"],
        Command::Jt(_) => vec!["jt"],
        Command::Lineshape(_) => vec!["lineshape"],
        Command::All(_) => {
            let mut v = Vec::new();
            if cfg.charge.is_some() {
                v.push("ctl");
            }
            if cfg.jt.is_some() {
                v.push("jt");
            }
            if cfg.lineshape.is_some() {
                v.push("lineshape");
            }
            if v.is_empty() {
                return Err(StageError::Input(anyhow!(
                    "config defines no stages: add a [charge], [jt], or [lineshape] section"
                )));
            }
            v
        }
    };

    // The first failing stage aborts the run with its own exit code, but
    // anything already computed is still written, and the manifest records
    // exactly the stages that completed.
    let mut outcomes: Vec<(StageOutcome, f64)> = Vec::new();
    let mut failure: Option<StageError> = None;
    for stage in stages {
        let started = std::time::Instant::now();
        let outcome = match stage {
            "ctl" => run_ctl(&cfg, base),
            "jt" => run_jt(&cfg),
            _ => run_lineshape(&cfg, base),
        };
        let wall_ms = started.elapsed().as_secs_f64() * 1e3;
        match outcome {
            Ok(o) => outcomes.push((o, wall_ms)),
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    if outcomes.is_empty() {
        // Nothing completed: report the failure without touching the
        // output directory.
        return Err(failure.expect("no outcomes without a failure"));
    }

    let out_dir = args
        .out
        .clone()
        .or_else(|| std::env::var_os("DEFECT_PHOTONICS_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| StageError::Input(anyhow!("creating {}: {e}", out_dir.display())))?;

    let mut manifest = RunManifest::new(command.name(), &config_bytes);
    let mut n_files = 0usize;
    for (outcome, wall_ms) in &outcomes {
        for (path, bytes) in &outcome.inputs {
            manifest.add_input(path, bytes);
        }
        for (file_name, contents) in &outcome.files {
            let path = out_dir.join(file_name);
            std::fs::write(&path, contents)
                .map_err(|e| StageError::Input(anyhow!("writing {}: {e}", path.display())))?;
            manifest.add_output(file_name, contents.as_bytes());
            n_files += 1;
        }
        manifest.add_stage(outcome.stage, *wall_ms, outcome.summary.clone());
        for note in &outcome.notes {
            println!("{note}");
        }
    }
    let manifest_path = out_dir.join("manifest.json");
    std::fs::write(&manifest_path, manifest.to_json())
        .map_err(|e| StageError::Input(anyhow!("writing {}: {e}", manifest_path.display())))?;
    println!(
        "wrote {n_files} output file(s) and manifest.json to {}",
        out_dir.display()
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
