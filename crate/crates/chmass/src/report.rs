//! Run reports and their serialized forms.

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    /// Must meet the tolerance.
    Check,
    /// A deliberately wrong input; passes when the failure is detected.
    Control,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "==")]
    Equal,
}

/// The input responsible for the measured extreme.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub point: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub direction: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub second_direction: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub value: Option<f64>,
}

// serde_json writes non-finite floats as null
fn nullable<'de, D: serde::Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub passed: bool,
    /// `null` in JSON when the check could not be evaluated.
    #[serde(deserialize_with = "nullable")]
    pub measured: f64,
    pub relation: Relation,
    pub threshold: f64,
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub offending: Option<Sample>,
}

impl Check {
    pub fn new(name: &str, kind: CheckKind, measured: f64, relation: Relation, threshold: f64) -> Self {
        let ok = match relation {
            Relation::AtMost => measured <= threshold,
            Relation::AtLeast => measured >= threshold,
            Relation::Equal => measured == threshold,
        };
        Self { name: name.into(), kind, passed: ok, measured, relation, threshold, detail: String::new(), offending: None }
    }

    pub fn at_most(name: &str, measured: f64, threshold: f64) -> Self {
        Self::new(name, CheckKind::Check, measured, Relation::AtMost, threshold)
    }

    pub fn at_least(name: &str, measured: f64, threshold: f64) -> Self {
        Self::new(name, CheckKind::Check, measured, Relation::AtLeast, threshold)
    }

    pub fn equal(name: &str, measured: f64, expected: f64) -> Self {
        Self::new(name, CheckKind::Check, measured, Relation::Equal, expected)
    }

    pub fn control(mut self) -> Self {
        self.kind = CheckKind::Control;
        self
    }

    pub fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = d.into();
        self
    }

    pub fn at(mut self, s: Sample) -> Self {
        self.offending = Some(s);
        self
    }

    /// A check that could not be evaluated.
    pub fn errored(name: &str, e: impl std::fmt::Display) -> Self {
        Self {
            name: name.into(),
            kind: CheckKind::Check,
            passed: false,
            measured: f64::NAN,
            relation: Relation::AtMost,
            threshold: 0.0,
            detail: format!("error: {e}"),
            offending: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stamp {
    pub tool: String,
    pub version: String,
    pub os: String,
    pub arch: String,
}

impl Stamp {
    pub fn current() -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub passed: bool,
    pub environment: Stamp,
    pub config_fingerprint: String,
    pub config: ExperimentConfig,
    pub checks: Vec<Check>,
    /// Limits of the mass functional, by form id, when the command computes them.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub functional: Vec<(String, f64)>,
}

impl RunReport {
    pub fn new(command: &str, config: &ExperimentConfig, checks: Vec<Check>) -> Self {
        Self {
            command: command.into(),
            passed: checks.iter().all(|c| c.passed),
            environment: Stamp::current(),
            config_fingerprint: config.fingerprint(),
            config: config.clone(),
            checks,
            functional: Vec::new(),
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// One row of `mass.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassRow {
    pub beta_id: String,
    #[serde(rename = "R")]
    pub r: f64,
    pub value: f64,
    pub est_limit: f64,
    pub kappa: f64,
    pub flag: String,
}

/// One row of `profile.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub x: f64,
    pub theta: f64,
    pub theta0: f64,
    pub alpha: f64,
    pub scal_display: f64,
    pub scal0_display: f64,
    pub scal_excess: f64,
}

/// Plain-text table of the checks.
pub fn table(report: &RunReport) -> String {
    let mut out = format!("{} ({})\n", report.command, if report.passed { "pass" } else { "FAIL" });
    for c in &report.checks {
        let rel = match c.relation {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
            Relation::Equal => "==",
        };
        let kind = if c.kind == CheckKind::Control { " [control]" } else { "" };
        out.push_str(&format!(
            "  {:<4} {:<28} {:>12.4e} {} {:<10.3e}{}{}\n",
            if c.passed { "ok" } else { "FAIL" },
            c.name,
            c.measured,
            rel,
            c.threshold,
            kind,
            if c.detail.is_empty() { String::new() } else { format!("  {}", c.detail) }
        ));
    }
    out
}
