//! Check records shared by the verification suites.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    /// the check could not be evaluated because a limiting procedure failed
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// the identity or property exercised, stated as a formula
    pub reference: String,
    pub measured: f64,
    pub tolerance: f64,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    /// Passes when `measured <= tolerance`.
    pub fn deviation(
        name: impl Into<String>,
        reference: impl Into<String>,
        measured: f64,
        tolerance: f64,
    ) -> Check {
        let status = if measured.is_finite() && measured <= tolerance {
            Status::Pass
        } else {
            Status::Fail
        };
        Check {
            name: name.into(),
            reference: reference.into(),
            measured,
            tolerance,
            status,
            detail: None,
        }
    }

    pub fn skipped(
        name: impl Into<String>,
        reference: impl Into<String>,
        why: impl Into<String>,
    ) -> Check {
        Check {
            name: name.into(),
            reference: reference.into(),
            measured: f64::NAN,
            tolerance: f64::NAN,
            status: Status::Skipped,
            detail: Some(format!("skipped: {}", why.into())),
        }
    }

    pub fn errored(
        name: impl Into<String>,
        reference: impl Into<String>,
        why: impl Into<String>,
    ) -> Check {
        Check {
            name: name.into(),
            reference: reference.into(),
            measured: f64::NAN,
            tolerance: f64::NAN,
            status: Status::Error,
            detail: Some(why.into()),
        }
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> Check {
        self.detail = Some(d.into());
        self
    }

    pub fn passed(&self) -> bool {
        matches!(self.status, Status::Pass | Status::Skipped)
    }
}

/// Relative deviation with an absolute floor for values near zero.
pub fn rel_dev(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1e-300)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub suite: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(suite: impl Into<String>, mut checks: Vec<Check>) -> Report {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        Report {
            suite: suite.into(),
            checks,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn any_errored(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Error)
    }
}
