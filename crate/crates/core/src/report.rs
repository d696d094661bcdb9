//! Structured pass/fail records.

use std::time::Duration;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Passes when `residual <= tolerance`.
    AtMost,
    /// Passes when `residual >= tolerance`.
    AtLeast,
    /// Boolean outcome; `residual` is 0 on success and 1 on failure.
    Flag,
    /// Recorded value, never gating.
    Info,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// Short tag of the property being verified.
    pub anchor: String,
    pub kind: CheckKind,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn at_most(name: impl Into<String>, anchor: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            anchor: anchor.into(),
            kind: CheckKind::AtMost,
            residual,
            tolerance,
            pass: residual <= tolerance,
            detail: None,
        }
    }

    pub fn at_least(name: impl Into<String>, anchor: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            anchor: anchor.into(),
            kind: CheckKind::AtLeast,
            residual: value,
            tolerance: bound,
            pass: value >= bound,
            detail: None,
        }
    }

    pub fn flag(name: impl Into<String>, anchor: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            anchor: anchor.into(),
            kind: CheckKind::Flag,
            residual: if ok { 0.0 } else { 1.0 },
            tolerance: 0.0,
            pass: ok,
            detail: None,
        }
    }

    pub fn info(name: impl Into<String>, anchor: impl Into<String>, value: f64) -> Self {
        Self { name: name.into(), anchor: anchor.into(), kind: CheckKind::Info, residual: value, tolerance: 0.0, pass: true, detail: None }
    }

    /// Failed check recording an error that prevented evaluation.
    pub fn error(name: impl Into<String>, anchor: impl Into<String>, err: impl std::fmt::Display) -> Self {
        Self {
            name: name.into(),
            anchor: anchor.into(),
            kind: CheckKind::Flag,
            residual: 1.0,
            tolerance: 0.0,
            pass: false,
            detail: Some(err.to_string()),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub checks: Vec<Check>,
    /// Wall-clock seconds; excluded from reproducibility comparisons.
    #[serde(default)]
    pub elapsed_seconds: f64,
    #[serde(default)]
    pub config: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>) -> Self {
        Self { suite: suite.into(), ..Default::default() }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        self.checks.extend(checks);
    }

    /// Record the outcome of a fallible evaluation: the checks it produced
    /// or a failed check carrying the error.
    pub fn record<E: std::fmt::Display>(&mut self, name: &str, anchor: &str, outcome: Result<Vec<Check>, E>) {
        match outcome {
            Ok(checks) => self.checks.extend(checks),
            Err(e) => self.checks.push(Check::error(name, anchor, e)),
        }
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
        if self.error.is_none() {
            self.error = other.error;
        }
    }

    pub fn pass(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn set_elapsed(&mut self, d: Duration) {
        self.elapsed_seconds = d.as_secs_f64();
    }

    /// Worst ratio `residual / tolerance` over the gating `AtMost` checks.
    pub fn worst_ratio(&self) -> f64 {
        self.checks
            .iter()
            .filter(|c| c.kind == CheckKind::AtMost && c.tolerance > 0.0)
            .map(|c| c.residual / c.tolerance)
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overall_pass_requires_every_check() {
        let mut r = VerificationReport::new("demo");
        r.push(Check::at_most("a", "x", 1e-12, 1e-10));
        r.push(Check::info("b", "y", 3.0));
        assert!(r.pass());
        r.push(Check::at_least("c", "z", 0.5, 1.0));
        assert!(!r.pass());
        assert_eq!(r.failures().next().unwrap().name, "c");
    }

    #[test]
    fn json_round_trip() {
        let mut r = VerificationReport::new("demo");
        r.push(Check::flag("f", "x", false).with_detail("why"));
        let s = serde_json::to_string(&r).unwrap();
        let back: VerificationReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
