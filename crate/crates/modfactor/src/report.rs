//! Machine-readable check reports shared by the CLI commands.
//!
//! Keys live in `BTreeMap`s so both the JSON and the text rendering are
//! deterministic for a given input.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::NumericConfig;

/// The tolerance triple a check ran with, echoed back in every report.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ConfigReport {
    pub psd_tol: f64,
    pub rank_tol: f64,
    pub verify_tol: f64,
}

impl From<&NumericConfig> for ConfigReport {
    fn from(cfg: &NumericConfig) -> Self {
        ConfigReport {
            psd_tol: cfg.psd_tol,
            rank_tol: cfg.rank_tol,
            verify_tol: cfg.verify_tol,
        }
    }
}

/// Outcome of one CLI command. `pass` is the single verdict the exit
/// code is derived from; everything else is evidence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub flags: BTreeMap<String, bool>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub defects: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub dims: BTreeMap<String, usize>,
    pub config: ConfigReport,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(command: &str, cfg: &NumericConfig) -> Self {
        Report {
            command: command.to_string(),
            pass: true,
            flags: BTreeMap::new(),
            defects: BTreeMap::new(),
            dims: BTreeMap::new(),
            config: cfg.into(),
            seed: None,
            notes: Vec::new(),
        }
    }

    /// Records a named defect and folds `defect <= tol` into `pass`.
    /// Written negated so a NaN defect fails instead of passing.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn check_defect(&mut self, name: &str, defect: f64, tol: f64) -> &mut Self {
        self.defects.insert(name.to_string(), defect);
        if !(defect <= tol) {
            self.pass = false;
        }
        self
    }

    /// Records an informational defect that does not gate `pass`.
    pub fn note_defect(&mut self, name: &str, defect: f64) -> &mut Self {
        self.defects.insert(name.to_string(), defect);
        self
    }

    /// Records a named boolean check and folds it into `pass`.
    pub fn check_flag(&mut self, name: &str, ok: bool) -> &mut Self {
        self.flags.insert(name.to_string(), ok);
        if !ok {
            self.pass = false;
        }
        self
    }

    /// Records an informational flag that does not gate `pass`.
    pub fn note_flag(&mut self, name: &str, value: bool) -> &mut Self {
        self.flags.insert(name.to_string(), value);
        self
    }

    pub fn dim(&mut self, name: &str, value: usize) -> &mut Self {
        self.dims.insert(name.to_string(), value);
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    pub fn seed(&mut self, seed: u64) -> &mut Self {
        self.seed = Some(seed);
        self
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Internal(e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{}: {}\n",
            self.command,
            if self.pass { "PASS" } else { "FAIL" }
        );
        for (name, value) in &self.flags {
            out.push_str(&format!("  {name} = {value}\n"));
        }
        for (name, value) in &self.dims {
            out.push_str(&format!("  {name} = {value}\n"));
        }
        for (name, value) in &self.defects {
            out.push_str(&format!("  {name} = {value:.3e}\n"));
        }
        if let Some(seed) = self.seed {
            out.push_str(&format!("  seed = {seed}\n"));
        }
        for note in &self.notes {
            out.push_str(&format!("  note: {note}\n"));
        }
        out
    }
}
