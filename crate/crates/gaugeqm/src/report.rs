use std::collections::BTreeMap;

use gaugeqm_core::lattice::Wavefunction;
use serde::Serialize;

use crate::config::ExperimentConfig;

/// One snapshot of a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesPoint {
    pub step: usize,
    pub time: f64,
    pub total_probability: f64,
    pub mean_position: f64,
    pub width: f64,
}

impl SeriesPoint {
    pub fn of(step: usize, psi: &Wavefunction) -> Self {
        Self {
            step,
            time: psi.time(),
            total_probability: psi.total_probability(),
            mean_position: psi.mean_position(),
            width: psi.width(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistancePoint {
    pub epsilon: f64,
    pub n_sites: usize,
    pub distance: f64,
}

/// Outcome of one named check: `measured` is compared against `threshold`
/// in the direction described by `criterion`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    pub criterion: String,
}

impl CheckResult {
    pub fn at_most(name: &str, measured: f64, threshold: f64) -> Self {
        Self { name: name.into(), passed: measured <= threshold, measured, threshold, criterion: "<=".into() }
    }

    pub fn at_least(name: &str, measured: f64, threshold: f64) -> Self {
        Self { name: name.into(), passed: measured >= threshold, measured, threshold, criterion: ">=".into() }
    }

    pub fn failed(name: &str, why: impl std::fmt::Display) -> Self {
        Self { name: name.into(), passed: false, measured: f64::NAN, threshold: f64::NAN, criterion: format!("error: {why}") }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct RunReport {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<ExperimentConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    pub group: String,
    pub pde_series: Vec<SeriesPoint>,
    pub path_series: Vec<SeriesPoint>,
    pub distances: Vec<DistancePoint>,
    pub distance_orders: Vec<f64>,
    pub checks: Vec<CheckResult>,
    /// Wall-clock seconds per phase.
    pub timings: BTreeMap<String, f64>,
    /// Set when a numerical step failed; the series stop there.
    pub failure: Option<String>,
}

impl RunReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn push_check(&mut self, check: CheckResult) {
        debug_assert!(self.checks.iter().all(|c| c.name != check.name), "duplicate check {}", check.name);
        self.checks.push(check);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    /// One line per check, for the terminal.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            s.push_str(&format!("{mark} {:<32} {:>12.4e} {} {:.4e}\n", c.name, c.measured, c.criterion, c.threshold));
        }
        if let Some(f) = &self.failure {
            s.push_str(&format!("FAILED: {f}\n"));
        }
        s
    }
}
