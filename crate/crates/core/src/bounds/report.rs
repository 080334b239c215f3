//! Experiment reports and their deterministic text form.

use std::fmt::Write;

use crate::grid::ScalarField;
use crate::stochastic::McEstimate;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    ReportOnly,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::ReportOnly => "REPORT-ONLY",
        }
    }
}

/// Gates decide the verdict; flags are recorded but never fail a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Gate,
    Flag,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub severity: Severity,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.to_string(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

/// Formats a real with 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub name: String,
    pub topic: String,
    pub inputs: Vec<(String, String)>,
    pub measured: Vec<(String, f64)>,
    pub estimates: Vec<(String, McEstimate)>,
    pub references: Vec<(String, f64)>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub tables: Vec<Table>,
    pub fields: Vec<(String, ScalarField)>,
    /// Conjecture experiments never claim a pass.
    pub report_only: bool,
}

impl ExperimentReport {
    pub fn new(name: &str, topic: &str) -> Self {
        Self {
            name: name.to_string(),
            topic: topic.to_string(),
            inputs: Vec::new(),
            measured: Vec::new(),
            estimates: Vec::new(),
            references: Vec::new(),
            checks: Vec::new(),
            notes: Vec::new(),
            tables: Vec::new(),
            fields: Vec::new(),
            report_only: false,
        }
    }

    pub fn input(&mut self, key: &str, value: impl ToString) {
        self.inputs.push((key.to_string(), value.to_string()));
    }

    pub fn measure(&mut self, key: &str, value: f64) {
        self.measured.push((key.to_string(), value));
    }

    pub fn estimate(&mut self, key: &str, value: McEstimate) {
        self.estimates.push((key.to_string(), value));
    }

    pub fn reference(&mut self, key: &str, value: f64) {
        self.references.push((key.to_string(), value));
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn gate(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.to_string(), passed, severity: Severity::Gate, detail: detail.into() });
    }

    pub fn flag(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.to_string(), passed, severity: Severity::Flag, detail: detail.into() });
    }

    pub fn verdict(&self) -> Verdict {
        if self.checks.iter().any(|c| c.severity == Severity::Gate && !c.passed) {
            Verdict::Fail
        } else if self.report_only {
            Verdict::ReportOnly
        } else {
            Verdict::Pass
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn measured_value(&self, key: &str) -> Option<f64> {
        self.measured.iter().find(|(k, _)| k == key).map(|&(_, v)| v)
    }

    pub fn estimate_value(&self, key: &str) -> Option<McEstimate> {
        self.estimates.iter().find(|(k, _)| k == key).map(|&(_, v)| v)
    }

    pub fn reference_value(&self, key: &str) -> Option<f64> {
        self.references.iter().find(|(k, _)| k == key).map(|&(_, v)| v)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// Structured text with a fixed section order; reruns give identical bytes.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "experiment = {}", self.name);
        let _ = writeln!(s, "topic = {}", self.topic);
        let _ = writeln!(s, "verdict = {}", self.verdict().as_str());
        let _ = writeln!(s, "\n[inputs]");
        for (k, v) in &self.inputs {
            let _ = writeln!(s, "{k} = {v}");
        }
        let _ = writeln!(s, "\n[measured]");
        for (k, v) in &self.measured {
            let _ = writeln!(s, "{k} = {}", fmt_real(*v));
        }
        let _ = writeln!(s, "\n[estimates]");
        for (k, e) in &self.estimates {
            let _ = writeln!(
                s,
                "{k} = {} +/- {} (n = {})",
                fmt_real(e.mean),
                fmt_real(e.std_error),
                e.n_paths
            );
        }
        let _ = writeln!(s, "\n[references]");
        for (k, v) in &self.references {
            let _ = writeln!(s, "{k} = {}", fmt_real(*v));
        }
        let _ = writeln!(s, "\n[checks]");
        for c in &self.checks {
            let status = match (c.severity, c.passed) {
                (Severity::Gate, true) => "PASS",
                (Severity::Gate, false) => "FAIL",
                (Severity::Flag, true) => "OK",
                (Severity::Flag, false) => "FLAGGED",
            };
            let _ = writeln!(s, "{} = {status} ; {}", c.name, c.detail);
        }
        if !self.notes.is_empty() {
            let _ = writeln!(s, "\n[notes]");
            for n in &self.notes {
                let _ = writeln!(s, "- {n}");
            }
        }
        if !self.tables.is_empty() {
            let _ = writeln!(s, "\n[tables]");
            for t in &self.tables {
                let _ = writeln!(s, "{} = {} rows ({})", t.name, t.rows.len(), t.columns.join(", "));
            }
        }
        s
    }
}

/// `|a − b| ≤ tol·|b|`, with a readable description.
pub(crate) fn relative(a: f64, b: f64, tol: f64) -> (bool, String) {
    let err = (a - b).abs() / b.abs();
    (err <= tol, format!("{} vs {} (relative error {:.3e}, tolerance {:.1e})", fmt_real(a), fmt_real(b), err, tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_rules() {
        let mut r = ExperimentReport::new("x", "y");
        assert_eq!(r.verdict(), Verdict::Pass);
        r.flag("f", false, "");
        assert_eq!(r.verdict(), Verdict::Pass);
        r.report_only = true;
        assert_eq!(r.verdict(), Verdict::ReportOnly);
        r.gate("g", false, "");
        assert_eq!(r.verdict(), Verdict::Fail);
        assert!(r.to_text().contains("verdict = FAIL"));
    }

    #[test]
    fn reals_have_seventeen_digits() {
        assert_eq!(fmt_real(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_real(-2.0), "-2.0000000000000000e0");
    }
}
