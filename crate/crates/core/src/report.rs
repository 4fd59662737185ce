//! Check reports and their text and JSON renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Computed and reported without affecting the outcome.
    Info,
    /// A required block is absent from the input geometry.
    Skipped,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Info => "INFO",
            Status::Skipped => "SKIP",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    /// Number of instances evaluated.
    pub inputs: usize,
    /// First non-zero defect in normal form, labelled by its input.
    pub defect: Option<String>,
    pub status: Status,
    pub ms: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub spec: String,
    pub seed: u64,
    pub degree_bound: usize,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

impl Report {
    pub fn new(spec: String, seed: u64, degree_bound: usize, checks: Vec<CheckRecord>) -> Self {
        let summary = Summary {
            passed: checks.iter().filter(|c| c.status == Status::Pass).count(),
            failed: checks.iter().filter(|c| c.status == Status::Fail).count(),
        };
        Report {
            spec,
            seed,
            degree_bound,
            checks,
            summary,
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn emit(&self, format: Format) -> String {
        match format {
            Format::Text => self.to_text(),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let width = self.checks.iter().map(|c| c.id.len()).max().unwrap_or(0);
        for c in &self.checks {
            let _ = write!(out, "{:<width$}  {:>5} inputs", c.id, c.inputs);
            if let Some(d) = &c.defect {
                let _ = write!(out, "  {d}");
            }
            if c.ms > 0 {
                let _ = write!(out, "  {}ms", c.ms);
            }
            let _ = writeln!(out, "  {}", c.status.label());
        }
        let total = self.summary.passed + self.summary.failed;
        let _ = writeln!(out, "{}/{} checks passed", self.summary.passed, total);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(id: &str, status: Status, defect: Option<&str>, ms: u64) -> CheckRecord {
        CheckRecord {
            id: id.into(),
            inputs: 3,
            defect: defect.map(Into::into),
            status,
            ms,
        }
    }

    fn sample() -> Report {
        Report::new(
            "demo".into(),
            7,
            4,
            vec![
                record("jacobi", Status::Pass, None, 0),
                record("compat", Status::Fail, Some("(a,e0): b"), 12),
                record("bicovariance", Status::Info, Some("(H,H): 1"), 0),
                record("spin", Status::Skipped, Some("requires spin_connection"), 0),
            ],
        )
    }

    #[test]
    fn summary_counts_only_pass_and_fail() {
        let r = sample();
        assert_eq!(r.summary, Summary { passed: 1, failed: 1 });
        assert!(!r.passed());
    }

    #[test]
    fn text_aligns_ids_and_ends_with_totals() {
        let text = sample().to_text();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "jacobi            3 inputs  PASS");
        assert_eq!(lines[1], "compat            3 inputs  (a,e0): b  12ms  FAIL");
        assert!(lines[3].ends_with("SKIP"));
        assert_eq!(lines[4], "1/2 checks passed");
    }

    #[test]
    fn json_round_trips() {
        let r = sample();
        let json = r.emit(Format::Json);
        assert!(json.ends_with('\n'));
        assert!(json.contains("\"status\": \"skipped\""));
        let back: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}
