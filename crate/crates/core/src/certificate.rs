//! Structured pass/fail records for every verified identity.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clause {
    pub clause: String,
    /// The result this clause instantiates, e.g. `subgroup-partition`.
    pub tag: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub subject: String,
    pub passed: bool,
    pub clauses: Vec<Clause>,
}

impl Certificate {
    pub fn new(subject: impl Into<String>) -> Self {
        Certificate {
            subject: subject.into(),
            passed: true,
            clauses: Vec::new(),
        }
    }

    /// Records one clause and returns whether it held.
    pub fn check(
        &mut self,
        clause: impl Into<String>,
        tag: impl Into<String>,
        passed: bool,
        detail: impl Into<String>,
    ) -> bool {
        self.passed &= passed;
        self.clauses.push(Clause {
            clause: clause.into(),
            tag: tag.into(),
            passed,
            detail: detail.into(),
        });
        passed
    }

    /// Appends every clause of `other`, prefixing clause names with its subject.
    pub fn absorb(&mut self, other: Certificate) {
        for c in other.clauses {
            self.passed &= c.passed;
            self.clauses.push(Clause {
                clause: format!("{}: {}", other.subject, c.clause),
                ..c
            });
        }
    }

    pub fn passed(&self) -> bool {
        self.passed && self.clauses.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Clause> {
        self.clauses.iter().filter(|c| !c.passed)
    }

    /// Converts a failed certificate into an error naming the first failing clause.
    pub fn into_result(self) -> Result<Certificate> {
        let failure = self
            .failures()
            .next()
            .map(|c| Error::cert(c.tag.clone(), format!("{}: {}: {}", self.subject, c.clause, c.detail)));
        match failure {
            None => Ok(self),
            Some(e) => Err(e),
        }
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} [{}]",
            self.subject,
            if self.passed() { "PASS" } else { "FAIL" }
        )?;
        for c in &self.clauses {
            write!(
                f,
                "  {} {} ({})",
                if c.passed { "ok  " } else { "FAIL" },
                c.clause,
                c.tag
            )?;
            if !c.detail.is_empty() {
                write!(f, ": {}", c.detail)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
