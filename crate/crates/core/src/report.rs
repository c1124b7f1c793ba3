use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Outcome of a single check. `passed` is decided from the recorded numbers
/// and `tolerance` only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub passed: bool,
    pub measured: BTreeMap<String, f64>,
    pub samples: BTreeMap<String, u64>,
    pub tolerance: f64,
    pub notes: Vec<String>,
    /// Points (or multi-indices) that witness a failure or a notable value.
    pub witnesses: Vec<Vec<f64>>,
}

impl VerificationReport {
    pub fn new(check: impl Into<String>, tolerance: f64) -> Self {
        VerificationReport {
            check: check.into(),
            passed: false,
            measured: BTreeMap::new(),
            samples: BTreeMap::new(),
            tolerance,
            notes: Vec::new(),
            witnesses: Vec::new(),
        }
    }

    pub fn measure(&mut self, key: &str, value: f64) -> &mut Self {
        self.measured.insert(key.to_string(), value);
        self
    }

    pub fn count(&mut self, key: &str, n: u64) -> &mut Self {
        self.samples.insert(key.to_string(), n);
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.measured.get(key).copied()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let vals: Vec<String> = self.measured.iter().map(|(k, v)| format!("{k}={v:.6e}")).collect();
        format!("{status} {} [{}] tol={:e}", self.check, vals.join(", "), self.tolerance)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let mut r = VerificationReport::new("demo", 1e-9);
        r.measure("max", 1.5).count("points", 10).note("ok");
        r.passed = true;
        let back: VerificationReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(r.summary().starts_with("PASS demo"));
    }
}
