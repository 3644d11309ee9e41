//! The subcommands: each runs a group of checks and writes its outputs.

use std::fs;
use std::path::{Path, PathBuf};

use chmass_core::mass::Executor;
use chmass_core::profile::{scal_display, scal_excess, theta_model, MomentumProfile, ProfileKind};
use serde::{Deserialize, Serialize};

use crate::checks::{self, MassOutcome};
use crate::config::{ConfigError, ExperimentConfig};
use crate::report::{table, Check, MassRow, ProfileRow, RunReport};

#[derive(Debug)]
pub struct RunOutput {
    pub report: RunReport,
    pub mass_rows: Vec<MassRow>,
    pub profile_rows: Vec<ProfileRow>,
}

impl RunOutput {
    fn new(command: &str, cfg: &ExperimentConfig, checks: Vec<Check>) -> Self {
        Self { report: RunReport::new(command, cfg, checks), mass_rows: Vec::new(), profile_rows: Vec::new() }
    }
}

pub fn flatness(cfg: &ExperimentConfig) -> RunOutput {
    let checks = vec![
        checks::curvature_sweep(cfg),
        checks::block_formula(cfg),
        checks::wrong_sign_control(cfg),
        checks::fubini_study_flat(cfg),
        checks::signature(cfg),
        checks::holonomy_dimension(cfg),
        checks::rh_holonomy_dimension(cfg),
    ];
    RunOutput::new("flatness", cfg, checks)
}

pub fn killing(cfg: &ExperimentConfig) -> RunOutput {
    let mut checks = vec![checks::killing_sweep(cfg), checks::perturbed_control(cfg), checks::norm_identities(cfg)];
    checks.extend(checks::beta_pairings(cfg));
    checks.extend(checks::lemma(cfg));
    checks.extend(checks::q_outputs(cfg));
    checks.push(checks::family_rank(cfg));
    RunOutput::new("killing", cfg, checks)
}

pub fn mass<E: Executor>(cfg: &ExperimentConfig, exec: &E) -> RunOutput {
    let mut o = MassOutcome::default();
    checks::model_mass(cfg, exec, &mut o);
    checks::appendix_mass(cfg, exec, &mut o);
    checks::equivariance(cfg, exec, &mut o);
    checks::slow_decay_control(cfg, exec, &mut o);
    checks::rh_mass_checks(cfg, exec, &mut o);
    finish("mass", cfg, o)
}

pub fn appendix<E: Executor>(cfg: &ExperimentConfig, exec: &E) -> RunOutput {
    let mut o = MassOutcome::default();
    o.checks.push(checks::origin_smoothness(cfg));
    o.checks.extend(checks::scal_checks(cfg));
    o.checks.extend(checks::decay_checks(cfg));
    o.checks.push(checks::two_path(cfg));
    o.checks.push(checks::display_identity(cfg));
    checks::appendix_mass(cfg, exec, &mut o);
    let mut out = finish("appendix", cfg, o);
    match checks::appendix_profile(cfg) {
        Ok(p) => out.profile_rows = profile_rows(&p, &profile_grid()),
        Err(e) => {
            out.report.checks.push(Check::errored("profile_table", e));
            out.report.passed = false;
        }
    }
    out
}

fn finish(command: &str, cfg: &ExperimentConfig, o: MassOutcome) -> RunOutput {
    let mut out = RunOutput::new(command, cfg, o.checks);
    out.report.functional = o.functional;
    out.mass_rows = o.rows;
    out
}

fn profile_grid() -> Vec<f64> {
    let mut g = vec![0.0];
    g.extend(chmass_core::profile::log_grid(1e-3, 1e3, 121));
    g
}

/// Profile, model profile and scalar curvatures (display normalization).
pub fn profile_rows(p: &MomentumProfile, grid: &[f64]) -> Vec<ProfileRow> {
    let model = theta_model(ProfileKind::Ch, p.m).expect("model profile");
    grid.iter()
        .map(|&x| {
            let theta = p.value(x);
            let theta0 = MomentumProfile::theta0(x);
            ProfileRow {
                x,
                theta,
                theta0,
                alpha: theta0 - theta,
                scal_display: scal_display(p, x).unwrap_or(f64::NAN),
                scal0_display: scal_display(&model, x).unwrap_or(f64::NAN),
                scal_excess: scal_excess(p, x),
            }
        })
        .collect()
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> std::io::Error {
    std::io::Error::other(format!("{}: {e}", path.display()))
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| io_err(path, e))?;
    }
    w.flush()
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| io_err(path, e))?;
    s.push('\n');
    fs::write(path, s)
}

/// `report.json`, plus `mass.csv` and `profile.csv` when the command produced rows.
pub fn write_outputs(dir: &Path, out: &RunOutput) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    write_json(&dir.join("report.json"), &out.report)?;
    if !out.mass_rows.is_empty() {
        write_csv(&dir.join("mass.csv"), &out.mass_rows)?;
    }
    if !out.profile_rows.is_empty() {
        write_csv(&dir.join("profile.csv"), &out.profile_rows)?;
    }
    fs::write(dir.join("summary.txt"), table(&out.report))
}

/// Several runs merged into one document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MergedReport {
    pub passed: bool,
    /// Set when the runs were made with different configurations.
    pub conflicting_configs: bool,
    pub config_fingerprints: Vec<String>,
    pub runs: Vec<RunReport>,
}

fn resolve(input: &Path) -> PathBuf {
    if input.is_dir() {
        input.join("report.json")
    } else {
        input.to_path_buf()
    }
}

/// Load and merge run reports. Missing or unreadable inputs, or no inputs
/// at all, are usage errors.
pub fn merge(inputs: &[PathBuf]) -> Result<MergedReport, ConfigError> {
    if inputs.is_empty() {
        return Err(ConfigError("report needs at least one input".into()));
    }
    let mut runs = Vec::new();
    for i in inputs {
        let path = resolve(i);
        let text = fs::read_to_string(&path).map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        let run: RunReport = serde_json::from_str(&text).map_err(|e| ConfigError(format!("{} is not a run report: {e}", path.display())))?;
        runs.push(run);
    }
    runs.sort_by(|a, b| (&a.command, &a.config_fingerprint).cmp(&(&b.command, &b.config_fingerprint)));
    let mut fps: Vec<String> = runs.iter().map(|r| r.config_fingerprint.clone()).collect();
    fps.sort();
    fps.dedup();
    Ok(MergedReport { passed: runs.iter().all(|r| r.passed), conflicting_configs: fps.len() > 1, config_fingerprints: fps, runs })
}

pub fn merged_summary(m: &MergedReport) -> String {
    let mut s = String::new();
    if m.conflicting_configs {
        s.push_str(&format!("warning: runs use {} different configurations\n", m.config_fingerprints.len()));
    }
    for r in &m.runs {
        s.push_str(&table(r));
    }
    s.push_str(if m.passed { "all runs pass\n" } else { "some checks FAIL\n" });
    s
}

pub fn write_merged(dir: &Path, m: &MergedReport) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    write_json(&dir.join("report.json"), m)?;
    fs::write(dir.join("summary.txt"), merged_summary(m))
}
