use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::config::RunConfig;

pub const ARTIFACT_VERSION: &str = concat!("ncqm ", env!("CARGO_PKG_VERSION"));

/// Outcome of one check. `pass` holds exactly when `max_residual <= tolerance`
/// and no error occurred.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub task: String,
    pub max_residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    pub worst_point: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
}

impl TaskRecord {
    pub fn from_tracker(task: impl Into<String>, tracker: MaxTracker, tolerance: f64) -> Self {
        let pass = tracker.error.is_none() && tracker.max.is_none_or(|m| m <= tolerance);
        Self {
            task: task.into(),
            max_residual: tracker.max,
            tolerance,
            pass,
            worst_point: tracker.worst,
            error: tracker.error,
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

/// Running maximum of a residual together with the first error seen.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MaxTracker {
    pub max: Option<f64>,
    pub worst: Option<(f64, f64)>,
    pub error: Option<String>,
}

impl MaxTracker {
    pub fn observe(&mut self, value: f64, point: (f64, f64)) {
        // NaN is treated as the worst possible value
        let worse = match self.max {
            None => true,
            Some(m) => value.is_nan() || value > m,
        };
        if worse && !self.max.is_some_and(f64::is_nan) {
            self.max = Some(value);
            self.worst = Some(point);
        }
    }

    pub fn fail(&mut self, message: impl Into<String>) {
        if self.error.is_none() {
            self.error = Some(message.into());
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config: RunConfig,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub records: Vec<TaskRecord>,
    pub provenance: Provenance,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let p = &self.provenance.config.profile;
        let _ = writeln!(out, "{}", self.provenance.version);
        let _ = writeln!(out, "profile: theta={} alpha={} f_poly={:?} gauge={}", p.theta, p.alpha, p.f_poly, p.gauge);
        for r in &self.records {
            let status = if r.pass { "PASS" } else { "FAIL" };
            let residual = r.max_residual.map_or("-".to_string(), |m| format!("{m:.3e}"));
            let _ = write!(out, "{status} {:<24} max={residual} tol={:.1e}", r.task, r.tolerance);
            if let Some((x, y)) = r.worst_point {
                let _ = write!(out, " at ({x}, {y})");
            }
            let _ = writeln!(out);
            if let Some(e) = &r.error {
                let _ = writeln!(out, "     error: {e}");
            }
            if let Some(d) = &r.detail {
                let _ = writeln!(out, "     {d}");
            }
        }
        let _ = writeln!(out, "overall: {}", if self.all_pass() { "PASS" } else { "FAIL" });
        out
    }
}
