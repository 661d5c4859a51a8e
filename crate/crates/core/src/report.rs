//! Structured outcomes of inequality checks.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Where the two sides of a check came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Provenance {
    Exact,
    /// Monte Carlo, with the standard error of the estimated side.
    MonteCarlo { se: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// The hypothesis gating the check does not hold; nothing is asserted.
    ConditionNotMet,
    /// Computed and reported, never asserted.
    Exploratory,
}

/// One checked inequality `lhs <= rhs + tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub instance: String,
    pub params: BTreeMap<String, f64>,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`.
    pub margin: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub asserted: bool,
    pub status: Status,
    pub provenance: Provenance,
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub note: String,
}

impl VerificationReport {
    /// An asserted exact check.
    pub fn exact(check: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self::build(check, lhs, rhs, tolerance, Provenance::Exact, true)
    }

    /// An asserted Monte Carlo check; `tolerance` should already include
    /// the SE inflation.
    pub fn monte_carlo(check: &str, lhs: f64, rhs: f64, tolerance: f64, se: f64) -> Self {
        Self::build(check, lhs, rhs, tolerance, Provenance::MonteCarlo { se }, true)
    }

    /// Computed and reported only.
    pub fn exploratory(check: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let mut r = Self::build(check, lhs, rhs, tolerance, Provenance::Exact, false);
        r.status = Status::Exploratory;
        r
    }

    /// Gate failed: `lhs` is the gating quantity, `rhs` its threshold.
    pub fn condition_not_met(check: &str, lhs: f64, rhs: f64) -> Self {
        let mut r = Self::build(check, lhs, rhs, 0.0, Provenance::Exact, false);
        r.status = Status::ConditionNotMet;
        r
    }

    fn build(check: &str, lhs: f64, rhs: f64, tolerance: f64, provenance: Provenance, asserted: bool) -> Self {
        let pass = lhs.is_finite() && rhs.is_finite() && lhs <= rhs + tolerance;
        Self {
            check: check.to_string(),
            instance: String::new(),
            params: BTreeMap::new(),
            lhs,
            rhs,
            margin: rhs - lhs,
            tolerance,
            pass,
            asserted,
            status: if pass { Status::Pass } else { Status::Fail },
            provenance,
            note: String::new(),
        }
    }

    pub fn param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn with_instance(mut self, name: &str) -> Self {
        self.instance = name.to_string();
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    /// An asserted check that did not hold.
    pub fn is_failure(&self) -> bool {
        self.asserted && !self.pass
    }
}

/// Fixed-width summary table, one row per report.
pub fn summary_table(reports: &[VerificationReport]) -> String {
    let mut out = format!(
        "{:<34} {:<22} {:>14} {:>14} {:>12}  {}\n",
        "check", "instance", "lhs", "rhs", "margin", "status"
    );
    for r in reports {
        let status = match r.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::ConditionNotMet => "condition not met",
            Status::Exploratory => "exploratory",
        };
        out.push_str(&format!(
            "{:<34} {:<22} {:>14.6e} {:>14.6e} {:>12.3e}  {}\n",
            r.check, r.instance, r.lhs, r.rhs, r.margin, status
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_iff_within_tolerance() {
        assert!(VerificationReport::exact("x", 1.0, 1.0 - 1e-12, 1e-9).pass);
        let r = VerificationReport::exact("x", 1.0, 0.5, 1e-9);
        assert!(!r.pass && r.is_failure());
        let g = VerificationReport::condition_not_met("gate", 3.0, 1.0);
        assert!(!g.is_failure());
        assert_eq!(g.status, Status::ConditionNotMet);
        assert!(!VerificationReport::exact("nan", f64::NAN, 1.0, 1.0).pass);
    }

    #[test]
    fn json_round_trip() {
        let r = VerificationReport::monte_carlo("probJ", 0.3, 0.5, 0.01, 0.003).param("k", 3.0);
        let back: VerificationReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
