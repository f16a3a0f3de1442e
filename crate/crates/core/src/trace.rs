//! Ordered derivation records: every intermediate quantity with the formula
//! that produced it, plus consistency checks and free-form notes.

use serde::{Deserialize, Serialize};

use crate::magnitude::Magnitude;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub name: String,
    pub citation: String,
    pub magnitude: Magnitude,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceCheck {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub entries: Vec<TraceEntry>,
    pub checks: Vec<TraceCheck>,
    pub notes: Vec<String>,
}

impl Trace {
    pub fn record(&mut self, name: &str, citation: &str, magnitude: &Magnitude) {
        self.entries.push(TraceEntry { name: name.into(), citation: citation.into(), magnitude: magnitude.clone() });
    }

    pub fn check(&mut self, name: &str, holds: bool, detail: impl Into<String>) {
        self.checks.push(TraceCheck { name: name.into(), holds, detail: detail.into() });
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Append another trace, prefixing its entry and check names.
    pub fn nest(&mut self, prefix: &str, inner: &Trace) {
        for e in &inner.entries {
            self.entries.push(TraceEntry { name: format!("{prefix}.{}", e.name), ..e.clone() });
        }
        for c in &inner.checks {
            self.checks.push(TraceCheck { name: format!("{prefix}.{}", c.name), ..c.clone() });
        }
        for n in &inner.notes {
            self.notes.push(format!("{prefix}: {n}"));
        }
    }

    pub fn get(&self, name: &str) -> Option<&Magnitude> {
        self.entries.iter().rev().find(|e| e.name == name).map(|e| &e.magnitude)
    }

    pub fn all_checks_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}
