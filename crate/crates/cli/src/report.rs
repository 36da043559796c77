use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// One result with the resolution and tolerances it was computed at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub key: String,
    pub value: Value,
    pub provenance: String,
}

/// Ordered key-value results of one command.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub entries: Vec<Entry>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report { command: command.to_string(), entries: Vec::new() }
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Into<Value>, provenance: impl Into<String>) {
        self.entries.push(Entry { key: key.into(), value: value.into(), provenance: provenance.into() });
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.iter().find(|e| e.key == key).map(|e| &e.value)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Report> {
        serde_json::from_str(s)
    }
}

impl fmt::Display for Report {
    /// `key=value [provenance]`, one entry per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            match &e.value {
                Value::String(s) => write!(f, "{}={}", e.key, s)?,
                v => write!(f, "{}={}", e.key, v)?,
            }
            if e.provenance.is_empty() {
                writeln!(f)?;
            } else {
                writeln!(f, " [{}]", e.provenance)?;
            }
        }
        Ok(())
    }
}
