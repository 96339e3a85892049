use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Pass,
    Fail,
    ReportOnly,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "Pass",
            Status::Fail => "Fail",
            Status::ReportOnly => "ReportOnly",
        })
    }
}

/// Whether a property gates the exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Hard,
    ReportOnly,
}

/// Outcome of one property.
///
/// Slack is signed so that a negative value is a violation. A hard property
/// passes when every check keeps its slack at or above `-tolerance`; the
/// reported `tolerance` is the loosest check tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyVerdict {
    pub property_id: String,
    pub samples: usize,
    pub worst_margin: f64,
    pub tolerance: f64,
    pub status: Status,
    pub counterexample: Option<Value>,
    pub details: Value,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub report_only: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub seed: u64,
    pub verdicts: Vec<PropertyVerdict>,
    pub summary: Summary,
}

impl Report {
    pub fn new(seed: u64, verdicts: Vec<PropertyVerdict>) -> Self {
        let mut summary = Summary::default();
        for v in &verdicts {
            match v.status {
                Status::Pass => summary.pass += 1,
                Status::Fail => summary.fail += 1,
                Status::ReportOnly => summary.report_only += 1,
            }
        }
        Self {
            seed,
            verdicts,
            summary,
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn verdict(&self, id: &str) -> Option<&PropertyVerdict> {
        self.verdicts.iter().find(|v| v.property_id == id)
    }
}

#[derive(Debug, Clone)]
struct Check {
    name: &'static str,
    tolerance: f64,
    worst: f64,
    samples: usize,
    violations: usize,
    counterexample: Option<Value>,
}

/// Accumulates slack observations for the checks of one property.
#[derive(Debug, Clone, Default)]
pub struct Tally {
    checks: Vec<Check>,
    cases: usize,
    notes: Map<String, Value>,
}

impl Tally {
    /// Counts one sampled case (a state, pair, triple or channel draw).
    pub fn case(&mut self) {
        self.cases += 1;
    }

    /// Records one slack value. The payload is built only when the sample
    /// becomes the worst seen so far for this check.
    pub fn record(
        &mut self,
        name: &'static str,
        tolerance: f64,
        slack: f64,
        payload: impl FnOnce() -> Value,
    ) {
        // NaN must never look like a pass; adding zero turns -0 into 0
        let slack = if slack.is_nan() { f64::MIN } else { slack + 0.0 };
        let index = match self.checks.iter().position(|c| c.name == name) {
            Some(i) => i,
            None => {
                self.checks.push(Check {
                    name,
                    tolerance,
                    worst: f64::INFINITY,
                    samples: 0,
                    violations: 0,
                    counterexample: None,
                });
                self.checks.len() - 1
            }
        };
        let check = &mut self.checks[index];
        check.samples += 1;
        if slack < -check.tolerance {
            check.violations += 1;
        }
        if slack < check.worst {
            check.worst = slack;
            check.counterexample = Some(payload());
        }
    }

    pub fn note(&mut self, key: &str, value: Value) {
        self.notes.insert(key.to_string(), value);
    }

    pub fn finish(self, id: &str, kind: Kind, error: Option<String>) -> PropertyVerdict {
        let worst_margin = self
            .checks
            .iter()
            .map(|c| c.worst)
            .fold(f64::INFINITY, f64::min);
        let worst_margin = if worst_margin.is_finite() { worst_margin } else { 0.0 };
        let tolerance = self.checks.iter().map(|c| c.tolerance).fold(0.0, f64::max);

        let mut checks = Map::new();
        for c in &self.checks {
            let mut entry = json!({
                "tolerance": c.tolerance,
                "worst_margin": c.worst,
                "samples": c.samples,
                "violations": c.violations,
            });
            // report-only checks keep their own witness so that every
            // violated check is backed by a payload
            if kind == Kind::ReportOnly && c.worst < 0.0 {
                entry["counterexample"] = c.counterexample.clone().unwrap_or(Value::Null);
            }
            checks.insert(c.name.to_string(), entry);
        }
        let mut details = self.notes;
        details.insert("checks".into(), Value::Object(checks));
        if let Some(e) = &error {
            details.insert("error".into(), Value::String(e.clone()));
        }

        let worst_check = self
            .checks
            .iter()
            .filter(|c| c.worst < 0.0)
            .min_by(|a, b| a.worst.total_cmp(&b.worst));
        let (status, counterexample) = match kind {
            Kind::ReportOnly => (
                Status::ReportOnly,
                match &error {
                    Some(e) => Some(json!({ "error": e })),
                    None => worst_check.and_then(|c| c.counterexample.clone()),
                },
            ),
            Kind::Hard => {
                let failing = self.checks.iter().find(|c| c.violations > 0);
                if let Some(e) = error {
                    (Status::Fail, Some(json!({ "error": e })))
                } else if let Some(c) = failing {
                    let mut payload = c.counterexample.clone().unwrap_or(Value::Null);
                    if let Value::Object(map) = &mut payload {
                        map.insert("check".into(), Value::String(c.name.into()));
                    }
                    (Status::Fail, Some(payload))
                } else if self.checks.is_empty() {
                    (Status::Fail, Some(json!({ "error": "no samples evaluated" })))
                } else {
                    (Status::Pass, None)
                }
            }
        };

        PropertyVerdict {
            property_id: id.to_string(),
            samples: self.cases,
            worst_margin,
            tolerance,
            status,
            counterexample,
            details: Value::Object(details),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hard_fail_carries_counterexample() {
        let mut t = Tally::default();
        t.case();
        t.record("a", 1e-9, 0.5, || json!({"x": 0}));
        t.case();
        t.record("a", 1e-9, -1e-3, || json!({"x": 1}));
        let v = t.finish("p", Kind::Hard, None);
        assert_eq!(v.status, Status::Fail);
        assert_eq!(v.worst_margin, -1e-3);
        assert_eq!(v.counterexample.unwrap()["x"], 1);
    }

    #[test]
    fn pass_within_tolerance() {
        let mut t = Tally::default();
        t.record("a", 1e-9, -1e-10, || json!({}));
        t.record("b", 1e-6, 2.0, || json!({}));
        let v = t.finish("p", Kind::Hard, None);
        assert_eq!(v.status, Status::Pass);
        assert!(v.counterexample.is_none());
        assert!(v.worst_margin >= -v.tolerance);
    }

    #[test]
    fn nan_is_a_violation() {
        let mut t = Tally::default();
        t.record("a", 1.0, f64::NAN, || json!({}));
        assert_eq!(t.finish("p", Kind::Hard, None).status, Status::Fail);
    }

    #[test]
    fn report_only_attaches_payload_when_violated() {
        let mut t = Tally::default();
        t.record("a", 1e-4, -1e-6, || json!({"w": 2}));
        let v = t.finish("p", Kind::ReportOnly, None);
        assert_eq!(v.status, Status::ReportOnly);
        assert_eq!(v.counterexample.unwrap()["w"], 2);

        let mut t = Tally::default();
        t.record("a", 1e-4, 0.3, || json!({}));
        assert!(t.finish("p", Kind::ReportOnly, None).counterexample.is_none());
    }

    #[test]
    fn summary_counts() {
        let mk = |status| PropertyVerdict {
            property_id: "x".into(),
            samples: 1,
            worst_margin: 0.0,
            tolerance: 0.0,
            status,
            counterexample: None,
            details: Value::Null,
        };
        let r = Report::new(1, vec![mk(Status::Pass), mk(Status::ReportOnly), mk(Status::Pass)]);
        assert_eq!(r.summary, Summary { pass: 2, fail: 0, report_only: 1 });
        assert!(r.passed());
    }
}
