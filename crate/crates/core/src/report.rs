//! Pass/fail bookkeeping for law checks.

use std::fmt;

use serde::{Deserialize, Serialize};

/// At most this many witnesses are stored per report; `failed` still counts
/// every failure.
pub const MAX_WITNESSES: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub law: String,
    pub detail: String,
    pub inputs: Vec<serde_json::Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub seed: Option<u64>,
    pub checked: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    /// Set when the sample supply ran out before the requested count.
    pub incomplete: bool,
    pub witnesses: Vec<Witness>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_ms: Option<u64>,
}

impl Report {
    pub fn new(suite: impl Into<String>, seed: Option<u64>) -> Self {
        Report {
            suite: suite.into(),
            seed,
            checked: 0,
            passed: 0,
            failed: 0,
            skipped: 0,
            incomplete: false,
            witnesses: Vec::new(),
            wall_time_ms: None,
        }
    }

    pub fn pass(&mut self) {
        self.checked += 1;
        self.passed += 1;
    }

    pub fn fail(&mut self, law: impl Into<String>, detail: impl Into<String>, inputs: Vec<serde_json::Value>) {
        self.checked += 1;
        self.failed += 1;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(Witness { law: law.into(), detail: detail.into(), inputs });
        }
    }

    /// Records a pass when `ok` holds and a failure otherwise.
    pub fn check(&mut self, ok: bool, law: &str, detail: impl FnOnce() -> String, inputs: impl FnOnce() -> Vec<serde_json::Value>) {
        if ok {
            self.pass();
        } else {
            self.fail(law, detail(), inputs());
        }
    }

    pub fn skip(&mut self) {
        self.skipped += 1;
    }

    pub fn ok(&self) -> bool {
        self.failed == 0 && !self.incomplete
    }

    /// Folds another report into this one.
    pub fn absorb(&mut self, other: Report) {
        self.checked += other.checked;
        self.passed += other.passed;
        self.failed += other.failed;
        self.skipped += other.skipped;
        self.incomplete |= other.incomplete;
        for w in other.witnesses {
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(w);
            }
        }
    }

    pub fn laws_failed(&self) -> Vec<&str> {
        let mut laws: Vec<&str> = self.witnesses.iter().map(|w| w.law.as_str()).collect();
        laws.sort();
        laws.dedup();
        laws
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} checked, {} passed, {} failed, {} skipped",
            self.suite, self.checked, self.passed, self.failed, self.skipped
        )?;
        if let Some(seed) = self.seed {
            write!(f, " (seed {seed})")?;
        }
        if self.incomplete {
            write!(f, " [incomplete]")?;
        }
        for w in &self.witnesses {
            write!(f, "\n  {}: {}", w.law, w.detail)?;
        }
        Ok(())
    }
}

pub fn to_json<T: Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).unwrap_or(serde_json::Value::Null)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failures_and_witnesses_agree() {
        let mut r = Report::new("t", Some(1));
        r.pass();
        assert!(r.ok());
        r.fail("law", "bad", vec![]);
        assert_eq!(r.failed, 1);
        assert_eq!(r.witnesses.len(), 1);
        assert!(!r.ok());
    }

    #[test]
    fn witness_storage_is_capped() {
        let mut r = Report::new("t", None);
        for _ in 0..100 {
            r.fail("law", "bad", vec![]);
        }
        assert_eq!(r.failed, 100);
        assert_eq!(r.witnesses.len(), MAX_WITNESSES);
    }
}
