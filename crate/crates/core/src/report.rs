//! Machine-readable verification reports.
//!
//! Reports are deterministic for a fixed seed and configuration: entries are
//! assembled in a fixed order, parameter maps are ordered, and all residuals
//! are serialized with full round-trip precision, so two runs with the same
//! config produce byte-identical JSON.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::Error;
use crate::tol;
use crate::Result;

/// Report schema version.
pub const SCHEMA_VERSION: u32 = 1;

/// Tolerances a run compares residuals against. Defaults come from the
/// ladder in [`tol`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct Tolerances {
    /// Closed-form involution identities (σ² = id).
    pub involution: f64,
    /// Identities through analytic differentials.
    pub analytic: f64,
    /// Identities through finite differences.
    pub fd: f64,
    /// Structural 4×4 identities of the retraction.
    pub structural: f64,
    /// Cross-point transport identities.
    pub cross_point: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            involution: tol::INVOLUTION,
            analytic: tol::ANTISYMPLECTIC_ANALYTIC,
            fd: tol::ANTISYMPLECTIC_FD,
            structural: tol::STRUCTURAL,
            cross_point: tol::CROSS_POINT,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("involution", self.involution),
            ("analytic", self.analytic),
            ("fd", self.fd),
            ("structural", self.structural),
            ("cross_point", self.cross_point),
        ] {
            if v <= 0.0 || !v.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "tolerance '{name}' must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Run configuration shared by all suites.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub samples: u64,
    /// Twisting number; must be even.
    pub m: i64,
    /// Band half-width of the twist.
    pub delta: f64,
    /// Iterates 0..=k_max are checked.
    pub k_max: u32,
    /// Starting quadrature grid for mapping degrees.
    pub grid: usize,
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 12345,
            samples: 10_000,
            m: 2,
            delta: 0.5,
            k_max: 5,
            grid: 256,
            tolerances: Tolerances::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m.rem_euclid(2) != 0 {
            return Err(Error::InvalidConfig(format!(
                "m must be even, got {}",
                self.m
            )));
        }
        if self.samples < 100 {
            return Err(Error::InvalidConfig(format!(
                "samples must be at least 100, got {}",
                self.samples
            )));
        }
        if self.delta <= 0.0 || !self.delta.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "delta must be positive, got {}",
                self.delta
            )));
        }
        if self.grid < 8 {
            return Err(Error::InvalidConfig(format!(
                "grid must be at least 8, got {}",
                self.grid
            )));
        }
        self.tolerances.validate()
    }
}

/// One verification entry: module, check, parameters, the measured residual
/// or exact value, and the verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckEntry {
    pub module: String,
    pub check: String,
    #[serde(skip_serializing_if = "Map::is_empty", default)]
    pub params: Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

impl CheckEntry {
    pub fn new(module: &str, check: &str) -> Self {
        CheckEntry {
            module: module.into(),
            check: check.into(),
            params: Map::new(),
            samples: None,
            max_residual: None,
            tolerance: None,
            value: None,
            pass: false,
            notes: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.into(), value.into());
        self
    }

    pub fn samples(mut self, n: u64) -> Self {
        self.samples = Some(n);
        self
    }

    /// Records a residual against a tolerance; pass iff residual ≤ tol.
    pub fn residual(mut self, residual: f64, tolerance: f64) -> Self {
        self.max_residual = Some(residual);
        self.tolerance = Some(tolerance);
        self.pass = residual <= tolerance;
        self
    }

    /// Records an exact value with an explicit verdict.
    pub fn value(mut self, value: impl Into<String>, pass: bool) -> Self {
        self.value = Some(value.into());
        self.pass = pass;
        self
    }

    pub fn verdict(mut self, pass: bool) -> Self {
        self.pass = pass;
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes = Some(text.into());
        self
    }
}

/// A full run: configuration echo plus entries; overall pass is the
/// conjunction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub suite: String,
    pub generator: String,
    pub config: RunConfig,
    pub entries: Vec<CheckEntry>,
    pub pass: bool,
}

impl Report {
    pub fn new(suite: &str, config: &RunConfig, entries: Vec<CheckEntry>) -> Self {
        let pass = entries.iter().all(|e| e.pass);
        Report {
            schema: SCHEMA_VERSION,
            suite: suite.into(),
            generator: crate::sample::GENERATOR.into(),
            config: config.clone(),
            entries,
            pass,
        }
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }

    /// Markdown rendering: one table row per check.
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# Verification report: {} ({})\n\n",
            self.suite,
            if self.pass { "PASS" } else { "FAIL" }
        ));
        out.push_str(&format!(
            "seed {} · samples {} · m {} · delta {} · k 0..={} · grid {}\n\n",
            self.config.seed,
            self.config.samples,
            self.config.m,
            self.config.delta,
            self.config.k_max,
            self.config.grid
        ));
        out.push_str("| module | check | samples | max residual | tolerance | value | pass |\n");
        out.push_str("|---|---|---|---|---|---|---|\n");
        for e in &self.entries {
            out.push_str(&format!(
                "| {} | {} | {} | {} | {} | {} | {} |\n",
                e.module,
                e.check,
                e.samples.map_or(String::new(), |s| s.to_string()),
                e.max_residual.map_or(String::new(), |r| format!("{r:.3e}")),
                e.tolerance.map_or(String::new(), |t| format!("{t:.1e}")),
                e.value.clone().unwrap_or_default(),
                if e.pass { "yes" } else { "NO" },
            ));
        }
        let notes: Vec<&CheckEntry> = self.entries.iter().filter(|e| e.notes.is_some()).collect();
        if !notes.is_empty() {
            out.push_str("\nNotes:\n");
            for e in notes {
                out.push_str(&format!(
                    "- {}/{}: {}\n",
                    e.module,
                    e.check,
                    e.notes.as_deref().unwrap_or_default()
                ));
            }
        }
        out
    }
}
