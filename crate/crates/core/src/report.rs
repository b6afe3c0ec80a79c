//! Verification reports shared by every checker and by the `verify` command.

use std::fmt::Write as _;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::DEFAULT_TOLERANCE;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

/// One named check. `max_residual` is normalised so that it is compared
/// directly against `tolerance`; exact checks report 0 on success and 1 on failure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub max_residual: f64,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Set when a failure would have passed at the default tolerance.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub tolerance_induced: bool,
}

impl Check {
    /// An integer-exact check.
    pub fn exact(name: impl Into<String>, ok: bool, witness: Option<Value>) -> Self {
        Check {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            max_residual: if ok { 0.0 } else { 1.0 },
            tolerance: 0.0,
            witness: if ok { None } else { witness },
            note: None,
            tolerance_induced: false,
        }
    }

    /// A floating-point check: passes iff `residual <= tolerance`.
    pub fn within(name: impl Into<String>, residual: f64, tolerance: f64, witness: Option<Value>) -> Self {
        let ok = residual <= tolerance;
        Check {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            max_residual: residual,
            tolerance,
            witness: if ok { None } else { witness },
            note: None,
            tolerance_induced: !ok && tolerance < DEFAULT_TOLERANCE && residual <= DEFAULT_TOLERANCE,
        }
    }

    pub fn skip(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status: Status::Skip,
            max_residual: 0.0,
            tolerance: 0.0,
            witness: None,
            note: Some(reason.into()),
            tolerance_induced: false,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Attaches data that is reported whether or not the check passed.
    pub fn with_data(mut self, data: Value) -> Self {
        self.witness = Some(data);
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    /// Wall time per suite; not part of the deterministic body.
    #[serde(skip)]
    pub timings: Vec<(String, Duration)>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
        self.timings.extend(other.timings);
    }

    /// Prefixes every check name with `prefix/`.
    pub fn prefixed(mut self, prefix: &str) -> Self {
        for c in &mut self.checks {
            c.name = format!("{prefix}/{}", c.name);
        }
        self
    }

    /// True when no check failed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }

    /// The deterministic machine-readable body (no timings).
    pub fn body_json(&self) -> String {
        serde_json::to_string_pretty(&self.checks).expect("report serialises")
    }

    /// `{"report": [...], "timing_ms": {...}}`; only `report` is reproducible.
    pub fn to_json(&self) -> String {
        let timing: serde_json::Map<String, Value> = self
            .timings
            .iter()
            .map(|(name, d)| (name.clone(), Value::from(d.as_secs_f64() * 1e3)))
            .collect();
        let doc = serde_json::json!({ "report": self.checks, "timing_ms": timing });
        serde_json::to_string_pretty(&doc).expect("report serialises")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skip => "SKIP",
            };
            let _ = write!(out, "{status} {:<48} residual={:.3e} tol={:.1e}", c.name, c.max_residual, c.tolerance);
            if c.tolerance_induced {
                out.push_str(" (tolerance-induced)");
            }
            if let Some(note) = &c.note {
                let _ = write!(out, " -- {note}");
            }
            if c.status == Status::Fail {
                if let Some(w) = &c.witness {
                    let _ = write!(out, " witness={w}");
                }
            }
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "{} passed, {} failed, {} skipped",
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Skip)
        );
        for (name, d) in &self.timings {
            let _ = writeln!(out, "time {name}: {:.3} ms", d.as_secs_f64() * 1e3);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_policy() {
        let c = Check::within("x", 1e-14, 0.0, None);
        assert_eq!(c.status, Status::Fail);
        assert!(c.tolerance_induced);
        let c = Check::within("x", 1e-3, 0.0, None);
        assert!(!c.tolerance_induced);
        let c = Check::within("x", 1e-14, 1e-9, None);
        assert_eq!(c.status, Status::Pass);
    }

    #[test]
    fn body_excludes_timings() {
        let mut r = VerificationReport::new();
        r.push(Check::exact("a", true, None));
        r.push(Check::skip("b", "no scenario"));
        let body = r.body_json();
        r.timings.push(("suite".into(), Duration::from_millis(3)));
        assert_eq!(body, r.body_json());
        assert!(r.passed());
        assert!(r.to_json().contains("timing_ms"));
    }
}
