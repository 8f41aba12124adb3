use std::collections::BTreeMap;

use serde::Serialize;

/// One named measurement with its acceptance rule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// Target for two-sided checks `|value − expected| ≤ tolerance`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
    /// Absent for informational records.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub relation: &'static str,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    /// `value ≤ tolerance`.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            expected: None,
            tolerance: Some(tolerance),
            relation: "<=",
            pass: value <= tolerance,
            note: None,
        }
    }

    /// `value ≥ bound`.
    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            value,
            expected: None,
            tolerance: Some(bound),
            relation: ">=",
            pass: value >= bound,
            note: None,
        }
    }

    /// `|value − expected| ≤ tolerance`.
    pub fn near(name: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            expected: Some(expected),
            tolerance: Some(tolerance),
            relation: "|value-expected|<=",
            pass: (value - expected).abs() <= tolerance,
            note: None,
        }
    }

    pub fn flag(name: impl Into<String>, pass: bool) -> Self {
        Check {
            name: name.into(),
            value: if pass { 1.0 } else { 0.0 },
            expected: None,
            tolerance: None,
            relation: "true",
            pass,
            note: None,
        }
    }

    pub fn info(name: impl Into<String>, value: f64) -> Self {
        Check {
            name: name.into(),
            value,
            expected: None,
            tolerance: None,
            relation: "info",
            pass: true,
            note: None,
        }
    }

    pub fn failure(name: impl Into<String>, note: String) -> Self {
        Check {
            name: name.into(),
            value: f64::NAN,
            expected: None,
            tolerance: None,
            relation: "error",
            pass: false,
            note: Some(note),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub task: String,
    pub group: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub checks: Vec<Check>,
    pub environment: BTreeMap<String, serde_json::Value>,
    pub pass: bool,
    pub wall_time_s: f64,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The report without its wall-time field, for reproducibility checks.
    pub fn payload(&self) -> String {
        let mut copy = self.clone();
        copy.wall_time_s = 0.0;
        copy.to_json()
    }
}
