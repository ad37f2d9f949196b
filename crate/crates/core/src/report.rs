//! Verdicts of checks and bounded searches.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::time::Duration;

/// Outcome vocabulary. `Verified` is reserved for facts settled exactly;
/// anything coming out of a bounded search that found nothing wrong is
/// `NoViolationUpTo`, and a search for a positive certificate that came up
/// empty is `NotFoundUpTo`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Verified,
    ViolationWitness(String),
    NoViolationUpTo,
    NotFoundUpTo,
}

impl Verdict {
    pub fn is_violation(&self) -> bool {
        matches!(self, Verdict::ViolationWitness(_))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Verified => f.write_str("Verified"),
            Verdict::ViolationWitness(w) => write!(f, "ViolationWitness({w})"),
            Verdict::NoViolationUpTo => f.write_str("NoViolationUpTo"),
            Verdict::NotFoundUpTo => f.write_str("NotFoundUpTo"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub name: String,
    pub bounds: Vec<(String, String)>,
    pub verdict: Verdict,
    pub details: Vec<String>,
    /// Wall-clock time, filled in by callers that can measure it. Not part of
    /// the rendered text so that reports stay reproducible.
    pub elapsed: Option<Duration>,
}

impl CheckReport {
    pub fn new(name: &str, verdict: Verdict) -> Self {
        CheckReport {
            name: name.to_string(),
            bounds: Vec::new(),
            verdict,
            details: Vec::new(),
            elapsed: None,
        }
    }

    pub fn bound(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.bounds.push((key.to_string(), value.to_string()));
        self
    }

    pub fn detail(mut self, line: impl Into<String>) -> Self {
        self.details.push(line.into());
        self
    }

    pub fn is_violation(&self) -> bool {
        self.verdict.is_violation()
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.bounds.is_empty() {
            f.write_str(" [")?;
            for (i, (k, v)) in self.bounds.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{k}={v}")?;
            }
            f.write_str("]")?;
        }
        write!(f, " {}", self.verdict)?;
        for d in &self.details {
            write!(f, "\n  - {d}")?;
        }
        Ok(())
    }
}
