//! Pass/fail verdict reports shared by the verification drivers.
//!
//! A report is an ordered list of named boolean verdicts with free-text
//! detail, plus notes for measured values that are not pass/fail. Reports
//! serialize to JSON with stable keys; the text rendering is for humans
//! and not meant to be parsed.

use std::time::Instant;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
    /// Wall-clock time of the check, for the report only; never compared.
    #[serde(default)]
    pub millis: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub title: String,
    pub verdicts: Vec<Verdict>,
    #[serde(default)]
    pub notes: Vec<String>,
    pub conclusion: String,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Report {
        Report {
            title: title.into(),
            verdicts: Vec::new(),
            notes: Vec::new(),
            conclusion: String::new(),
        }
    }

    /// Runs a check, timing it; the closure returns (pass, detail).
    pub fn record<F>(&mut self, name: &str, check: F) -> bool
    where
        F: FnOnce() -> (bool, String),
    {
        let start = Instant::now();
        let (pass, detail) = check();
        self.verdicts.push(Verdict {
            name: name.to_string(),
            pass,
            detail,
            millis: start.elapsed().as_millis() as u64,
        });
        pass
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.title);
        out.push('\n');
        for v in &self.verdicts {
            out.push_str(&format!(
                "  [{}] {}: {} ({} ms)\n",
                if v.pass { "PASS" } else { "FAIL" },
                v.name,
                v.detail,
                v.millis
            ));
        }
        for n in &self.notes {
            out.push_str(&format!("  note: {}\n", n));
        }
        if !self.conclusion.is_empty() {
            out.push_str(&format!("  => {}\n", self.conclusion));
        }
        out
    }
}
