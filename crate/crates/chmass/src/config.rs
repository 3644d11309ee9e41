//! Experiment configuration, read from TOML.

use std::path::Path;

use chmass_core::profile::BumpSpec;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Anything wrong with the configuration; maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Complex dimension.
    pub m: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Random (point, plane) samples per sweep.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Points for the norm identities.
    #[serde(default = "default_norm_samples")]
    pub norm_samples: usize,
    /// Largest Euclidean radius of sampled ball points.
    #[serde(default = "default_sample_radius")]
    pub sample_radius: f64,
    #[serde(default)]
    pub connection: ConnectionConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub mass: MassConfig,
    #[serde(default)]
    pub bump: BumpConfig,
    #[serde(default)]
    pub holonomy: HolonomyConfig,
}

fn default_seed() -> u64 {
    2024
}
fn default_samples() -> usize {
    20
}
fn default_norm_samples() -> usize {
    100
}
fn default_sample_radius() -> f64 {
    0.8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionConfig {
    /// Sign parameter of the connection; `-1` is the flat one on the model.
    pub c: f64,
}

impl Default for ConnectionConfig {
    fn default() -> Self {
        Self { c: -1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub flat: f64,
    pub block_formula: f64,
    pub killing: f64,
    /// The perturbed control must exceed this.
    pub control: f64,
    pub norm: f64,
    pub q_map: f64,
    pub third_order: f64,
    pub holonomy_rank: f64,
    pub mass: f64,
    pub fit_residual: f64,
    pub decay: f64,
    pub equivariance: f64,
    pub two_path: f64,
    pub display: f64,
    pub scal: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            flat: 1e-5,
            block_formula: 1e-4,
            killing: 1e-4,
            control: 1e-3,
            norm: 1e-10,
            q_map: 1e-8,
            third_order: 1e-4,
            holonomy_rank: 1e-6,
            mass: 1e-6,
            fit_residual: 1e-2,
            decay: 0.05,
            equivariance: 0.02,
            two_path: 1e-10,
            display: 1e-12,
            scal: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MassConfig {
    pub radii: Vec<f64>,
    /// Nodes per angular dimension; 24 for m = 2 and 8 above when unset.
    pub nodes: Option<usize>,
    pub equivariance_radii: Vec<f64>,
    /// 12 for m = 2 and 8 above when unset.
    pub equivariance_nodes: Option<usize>,
    /// Rapidity of the boost used for the pullback experiment.
    pub boost: f64,
    /// Decay rate `a` of the slow-decay control; `m` when unset.
    pub control_rate: Option<f64>,
    pub control_eps: f64,
    /// Decay rate of the real hyperbolic radial perturbation; `n` when unset.
    pub rh_rate: Option<f64>,
    pub rh_eps: f64,
}

impl Default for MassConfig {
    fn default() -> Self {
        Self {
            radii: (0..6).map(|i| 2.0 + 0.5 * i as f64).collect(),
            nodes: None,
            equivariance_radii: (0..6).map(|i| 3.0 + 0.5 * i as f64).collect(),
            equivariance_nodes: None,
            boost: 0.3,
            control_rate: None,
            control_eps: 0.1,
            rh_rate: None,
            rh_eps: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BumpConfig {
    pub z0: f64,
    pub z1: f64,
    pub sharpness: f64,
}

impl Default for BumpConfig {
    fn default() -> Self {
        Self { z0: 1.0, z1: 2.0, sharpness: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HolonomyConfig {
    pub loops: usize,
    /// Radius of the small circles.
    pub loop_radius: f64,
}

impl Default for HolonomyConfig {
    fn default() -> Self {
        Self { loops: 4, loop_radius: 0.15 }
    }
}

impl ExperimentConfig {
    /// Defaults for complex dimension `m`.
    pub fn for_m(m: usize) -> Self {
        toml::from_str(&format!("m = {m}")).expect("defaults parse")
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.m < 2 {
            return err(format!("m must be at least 2, got {}", self.m));
        }
        if self.m > 6 {
            return err(format!("m = {} is beyond the supported range 2..=6", self.m));
        }
        if self.samples == 0 || self.norm_samples == 0 {
            return err("sample counts must be positive");
        }
        if !(self.sample_radius > 0.0 && self.sample_radius < 1.0) {
            return err("sample_radius must lie in (0, 1)");
        }
        if !self.connection.c.is_finite() {
            return err("connection.c must be finite");
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("flat", t.flat),
            ("block_formula", t.block_formula),
            ("killing", t.killing),
            ("control", t.control),
            ("norm", t.norm),
            ("q_map", t.q_map),
            ("third_order", t.third_order),
            ("holonomy_rank", t.holonomy_rank),
            ("mass", t.mass),
            ("fit_residual", t.fit_residual),
            ("decay", t.decay),
            ("equivariance", t.equivariance),
            ("two_path", t.two_path),
            ("display", t.display),
            ("scal", t.scal),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return err(format!("tolerance {name} must be positive, got {v}"));
            }
        }
        check_schedule("mass.radii", &self.mass.radii)?;
        check_schedule("mass.equivariance_radii", &self.mass.equivariance_radii)?;
        if self.mass.nodes.is_some_and(|n| n < 2) || self.mass.equivariance_nodes.is_some_and(|n| n < 2) {
            return err("node counts must be at least 2");
        }
        if !self.mass.boost.is_finite() || !self.mass.control_eps.is_finite() || !self.mass.rh_eps.is_finite() {
            return err("mass parameters must be finite");
        }
        if self.mass.control_rate.is_some_and(|a| !(a > 0.0)) || self.mass.rh_rate.is_some_and(|a| !(a > 0.0)) {
            return err("decay rates must be positive");
        }
        if self.holonomy.loops == 0 || !(self.holonomy.loop_radius > 0.0 && self.holonomy.loop_radius < 0.2) {
            return err("holonomy needs at least one loop and a loop radius in (0, 0.2)");
        }
        self.bump_spec()?;
        Ok(())
    }

    pub fn bump_spec(&self) -> Result<BumpSpec, ConfigError> {
        BumpSpec::new(self.bump.z0, self.bump.z1, self.bump.sharpness).map_err(|e| ConfigError(e.to_string()))
    }

    pub fn nodes(&self) -> usize {
        self.mass.nodes.unwrap_or(if self.m <= 2 { 24 } else { 8 })
    }

    pub fn equivariance_nodes(&self) -> usize {
        self.mass.equivariance_nodes.unwrap_or(if self.m <= 2 { 12 } else { 8 })
    }

    /// SHA-256 of the canonical JSON echo.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn check_schedule(name: &str, r: &[f64]) -> Result<(), ConfigError> {
    if r.len() < 3 {
        return err(format!("{name} needs at least three radii"));
    }
    if r.iter().any(|x| !(x.is_finite() && *x > 0.0)) || r.windows(2).any(|w| w[1] <= w[0]) {
        return err(format!("{name} must be positive and strictly increasing"));
    }
    Ok(())
}
