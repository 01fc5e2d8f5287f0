use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::fields::{Gauge, NCProfile};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Omega0,
    Omega2,
    Jacobi,
    Roundtrip,
    Counterexample,
    Lsz,
    Limits,
}

impl Task {
    pub const ALL: [Task; 7] =
        [Task::Omega0, Task::Omega2, Task::Jacobi, Task::Roundtrip, Task::Counterexample, Task::Lsz, Task::Limits];

    pub fn name(&self) -> &'static str {
        match self {
            Task::Omega0 => "omega0",
            Task::Omega2 => "omega2",
            Task::Jacobi => "jacobi",
            Task::Roundtrip => "roundtrip",
            Task::Counterexample => "counterexample",
            Task::Lsz => "lsz",
            Task::Limits => "limits",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Task::ALL.iter().find(|t| t.name() == s.trim()).cloned().ok_or_else(|| format!("unknown task '{s}'"))
    }
}

/// Profile section of the run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub theta: f64,
    pub alpha: f64,
    #[serde(default = "default_f_poly")]
    pub f_poly: Vec<f64>,
    pub gauge: Gauge,
}

fn default_f_poly() -> Vec<f64> {
    vec![0.0, 1.0]
}

impl ProfileConfig {
    pub fn profile(&self) -> NCProfile {
        NCProfile { theta: self.theta, alpha: self.alpha, f_poly: self.f_poly.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { xmin: -3.0, xmax: 3.0, ymin: -3.0, ymax: 3.0, nx: 21, ny: 21 }
    }
}

impl GridConfig {
    /// Grid nodes with `x` varying slowest; endpoints are included exactly.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let axis = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
            (0..n).map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect()
        };
        let xs = axis(self.xmin, self.xmax, self.nx);
        let ys = axis(self.ymin, self.ymax, self.ny);
        xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_jacobi")]
    pub jacobi: f64,
    #[serde(default = "default_roundtrip")]
    pub roundtrip: f64,
    #[serde(default = "default_omega2_match")]
    pub omega2_match: f64,
    /// First and second derivatives in the round trip.
    #[serde(default = "default_roundtrip_derivatives")]
    pub roundtrip_derivatives: f64,
    /// Agreement of the independent bracket constructions.
    #[serde(default = "default_omega0_match")]
    pub omega0_match: f64,
}

fn default_jacobi() -> f64 {
    1e-9
}
fn default_roundtrip() -> f64 {
    1e-10
}
fn default_omega2_match() -> f64 {
    1e-8
}
fn default_roundtrip_derivatives() -> f64 {
    1e-8
}
fn default_omega0_match() -> f64 {
    1e-10
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            jacobi: default_jacobi(),
            roundtrip: default_roundtrip(),
            omega2_match: default_omega2_match(),
            roundtrip_derivatives: default_roundtrip_derivatives(),
            omega0_match: default_omega0_match(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub profile: ProfileConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default = "default_jet_order")]
    pub jet_order: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_tasks")]
    pub tasks: Vec<Task>,
}

fn default_jet_order() -> usize {
    crate::jet::DEFAULT_ORDER
}

fn default_tasks() -> Vec<Task> {
    Task::ALL.to_vec()
}

/// Invalid configuration, located by a dotted field path.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{path}: {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

fn invalid(path: &str, message: impl Into<String>) -> ConfigError {
    ConfigError { path: path.to_string(), message: message.into() }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| invalid("<root>", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let p = &self.profile;
        if !p.theta.is_finite() {
            return Err(invalid("profile.theta", "must be finite"));
        }
        if !p.alpha.is_finite() || p.alpha < 0.0 {
            return Err(invalid("profile.alpha", "must be finite and non-negative"));
        }
        if p.f_poly.is_empty() {
            return Err(invalid("profile.f_poly", "must not be empty"));
        }
        if let Some(k) = p.f_poly.iter().position(|c| !c.is_finite()) {
            return Err(invalid(&format!("profile.f_poly[{k}]"), "must be finite"));
        }
        let g = &self.grid;
        for (name, v) in [("xmin", g.xmin), ("xmax", g.xmax), ("ymin", g.ymin), ("ymax", g.ymax)] {
            if !v.is_finite() {
                return Err(invalid(&format!("grid.{name}"), "must be finite"));
            }
        }
        if g.xmax <= g.xmin {
            return Err(invalid("grid.xmax", "must exceed grid.xmin"));
        }
        if g.ymax <= g.ymin {
            return Err(invalid("grid.ymax", "must exceed grid.ymin"));
        }
        if g.nx < 2 {
            return Err(invalid("grid.nx", "must be at least 2"));
        }
        if g.ny < 2 {
            return Err(invalid("grid.ny", "must be at least 2"));
        }
        if self.jet_order < 3 {
            return Err(invalid("jet_order", "must be at least 3"));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("jacobi", t.jacobi),
            ("roundtrip", t.roundtrip),
            ("omega2_match", t.omega2_match),
            ("roundtrip_derivatives", t.roundtrip_derivatives),
            ("omega0_match", t.omega0_match),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(&format!("tolerances.{name}"), "must be positive"));
            }
        }
        if self.tasks.is_empty() {
            return Err(invalid("tasks", "must list at least one task"));
        }
        Ok(())
    }

    /// Requested tasks, deduplicated, in execution order.
    pub fn ordered_tasks(&self) -> Vec<Task> {
        Task::ALL.iter().filter(|t| self.tasks.contains(t)).cloned().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let cfg = RunConfig::from_json(r#"{"profile":{"theta":0.1,"alpha":0.5,"gauge":"phi"}}"#).unwrap();
        assert_eq!(cfg.grid, GridConfig::default());
        assert_eq!(cfg.jet_order, 4);
        assert_eq!(cfg.tolerances, Tolerances::default());
        assert_eq!(cfg.ordered_tasks(), Task::ALL.to_vec());
        assert_eq!(cfg.profile.f_poly, vec![0.0, 1.0]);
    }

    #[test]
    fn errors_carry_field_paths() {
        let bad = |s: &str| RunConfig::from_json(s).unwrap_err().path;
        assert_eq!(bad(r#"{"profile":{"theta":0.1,"alpha":-1,"gauge":"phi"}}"#), "profile.alpha");
        assert_eq!(
            bad(
                r#"{"profile":{"theta":0.1,"alpha":1,"gauge":"phi"},"grid":{"xmin":0,"xmax":0,"ymin":0,"ymax":1,"nx":3,"ny":3}}"#
            ),
            "grid.xmax"
        );
        assert_eq!(bad(r#"{"profile":{"theta":0.1,"alpha":1,"gauge":"phi"},"jet_order":2}"#), "jet_order");
        assert_eq!(
            bad(r#"{"profile":{"theta":0.1,"alpha":1,"gauge":"phi"},"tolerances":{"jacobi":0}}"#),
            "tolerances.jacobi"
        );
        assert_eq!(bad(r#"{"profile":{"theta":0.1,"alpha":1,"gauge":"psi"}}"#), "<root>");
    }

    #[test]
    fn grid_endpoints_are_exact() {
        let pts = GridConfig::default().points();
        assert_eq!(pts.len(), 441);
        assert_eq!(pts[0], (-3.0, -3.0));
        assert_eq!(pts[440], (3.0, 3.0));
        assert_eq!(pts[1].0, -3.0);
        assert!((pts[1].1 + 2.7).abs() < 1e-15);
    }
}
