//! Structured check outcomes.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize};
use serde_json::Value as Json;

use crate::error::NevError;

pub const REPORT_SCHEMA: &str = "nevlab-report-1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    SkippedCapability,
}

/// Non-finite numbers serialize as `null` and come back as NaN.
fn nan_from_null<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

/// One inequality `lhs <= rhs + slack`; `margin = rhs + slack - lhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub inputs: Json,
    #[serde(deserialize_with = "nan_from_null")]
    pub lhs: f64,
    #[serde(deserialize_with = "nan_from_null")]
    pub rhs: f64,
    #[serde(deserialize_with = "nan_from_null")]
    pub margin: f64,
    /// Exempt samples sit in the tolerated exceptional set and do not
    /// influence the verdict.
    pub exempt: bool,
}

impl Sample {
    /// NaN margins count as violations.
    pub fn holds(&self) -> bool {
        self.margin >= 0.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub schema: String,
    pub check_id: String,
    pub paper_anchor: String,
    pub function_id: String,
    pub parameters: BTreeMap<String, Json>,
    pub samples: Vec<Sample>,
    pub verdict: Verdict,
    pub notes: String,
}

impl CheckReport {
    pub(crate) fn new(check_id: &str, anchor: &str, function_id: &str, slack: f64) -> CheckReport {
        let mut parameters = BTreeMap::new();
        parameters.insert("slack".to_string(), Json::from(slack));
        CheckReport {
            schema: REPORT_SCHEMA.to_string(),
            check_id: check_id.to_string(),
            paper_anchor: anchor.to_string(),
            function_id: function_id.to_string(),
            parameters,
            samples: Vec::new(),
            verdict: Verdict::Pass,
            notes: String::new(),
        }
    }

    pub fn slack(&self) -> f64 {
        self.parameters.get("slack").and_then(Json::as_f64).unwrap_or(0.0)
    }

    pub(crate) fn param(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Json::Null);
        self.parameters.insert(key.to_string(), v);
    }

    pub(crate) fn note(&mut self, text: impl AsRef<str>) {
        if !self.notes.is_empty() {
            self.notes.push_str("; ");
        }
        self.notes.push_str(text.as_ref());
    }

    pub(crate) fn push(&mut self, inputs: Json, lhs: f64, rhs: f64) -> &mut Sample {
        let margin = rhs + self.slack() - lhs;
        self.samples.push(Sample {
            inputs,
            lhs,
            rhs,
            margin,
            exempt: false,
        });
        self.samples.last_mut().expect("just pushed")
    }

    pub fn violations(&self) -> usize {
        self.samples.iter().filter(|s| !s.exempt && !s.holds()).count()
    }

    /// Sets the verdict from the samples. A report without samples counts
    /// as skipped.
    pub(crate) fn finish(mut self) -> CheckReport {
        if self.verdict == Verdict::SkippedCapability {
            return self;
        }
        self.verdict = if self.samples.is_empty() {
            if self.notes.is_empty() {
                self.note("no applicable samples");
            }
            Verdict::SkippedCapability
        } else if self.violations() == 0 {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        self
    }

    /// Maps a check-level error onto the report: capability gaps skip, all
    /// other errors fail.
    pub(crate) fn absorb(mut self, err: NevError) -> CheckReport {
        match err {
            NevError::CapabilityRejected(msg) => {
                self.note(format!("skipped: {msg}"));
                self.verdict = Verdict::SkippedCapability;
            }
            other => {
                self.note(format!("error: {other}"));
                self.verdict = Verdict::Fail;
            }
        }
        self
    }
}

/// Counts of verdicts for one check id.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictCounts {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

/// Per-check verdict counts in first-appearance order.
pub fn summarize(reports: &[CheckReport]) -> Vec<(String, VerdictCounts)> {
    let mut out: Vec<(String, VerdictCounts)> = Vec::new();
    for r in reports {
        let idx = match out.iter().position(|(id, _)| *id == r.check_id) {
            Some(i) => i,
            None => {
                out.push((r.check_id.clone(), VerdictCounts::default()));
                out.len() - 1
            }
        };
        let c = &mut out[idx].1;
        match r.verdict {
            Verdict::Pass => c.pass += 1,
            Verdict::Fail => c.fail += 1,
            Verdict::SkippedCapability => c.skipped += 1,
        }
    }
    out
}
