//! Structured pass/fail records with witnesses, residuals and tolerances.

use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Serialize)]
pub struct Residual {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    /// true when the residual must exceed the tolerance instead of staying
    /// under it (strict-positivity margins).
    pub lower_bound: bool,
}

impl Residual {
    pub fn within(&self) -> bool {
        if self.lower_bound {
            self.value > self.tolerance
        } else {
            self.value <= self.tolerance && self.value.is_finite()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub label: String,
    pub chart: Option<String>,
    pub params: Option<[f64; 2]>,
    pub value: serde_json::Value,
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct GridInfo {
    pub nu: usize,
    pub nv: usize,
    pub charts: Vec<String>,
    pub points: usize,
    pub excluded: usize,
}

/// Outcome of one verification: `pass` holds exactly when every residual is
/// within its tolerance; witnesses make the extremal points re-evaluable.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub pass: bool,
    pub residuals: Vec<Residual>,
    pub witnesses: Vec<Witness>,
    pub tolerances: BTreeMap<String, f64>,
    pub grid: GridInfo,
    pub config_hash: String,
    pub details: serde_json::Value,
}

impl VerificationReport {
    pub fn new(check: &str) -> VerificationReport {
        VerificationReport {
            check: check.to_string(),
            pass: true,
            residuals: Vec::new(),
            witnesses: Vec::new(),
            tolerances: BTreeMap::new(),
            grid: GridInfo::default(),
            config_hash: String::new(),
            details: serde_json::Value::Null,
        }
    }

    pub fn residual(&mut self, name: &str, value: f64, tolerance: f64) -> &mut Self {
        self.tolerances.insert(name.to_string(), tolerance);
        self.residuals.push(Residual {
            name: name.to_string(),
            value,
            tolerance,
            lower_bound: false,
        });
        self
    }

    /// Strict lower bound: value must exceed the threshold.
    pub fn margin(&mut self, name: &str, value: f64, threshold: f64) -> &mut Self {
        self.tolerances.insert(name.to_string(), threshold);
        self.residuals.push(Residual {
            name: name.to_string(),
            value,
            tolerance: threshold,
            lower_bound: true,
        });
        self
    }

    pub fn witness(
        &mut self,
        label: &str,
        chart: Option<&str>,
        params: Option<[f64; 2]>,
        value: serde_json::Value,
    ) -> &mut Self {
        self.witnesses.push(Witness {
            label: label.to_string(),
            chart: chart.map(|s| s.to_string()),
            params,
            value,
        });
        self
    }

    /// Recompute `pass` from the residual list (and an optional extra veto).
    pub fn finish(mut self, extra_ok: bool) -> VerificationReport {
        self.pass = extra_ok && self.residuals.iter().all(Residual::within);
        self
    }

    pub fn summary_line(&self) -> String {
        format!(
            "[{}] {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.check
        )
    }
}
