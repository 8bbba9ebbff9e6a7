//! Violation reports produced by the identity checkers.

use std::collections::BTreeMap;
use std::fmt;

use crate::rational::format_rational;
use crate::tensor::Coeffs;

/// One failed identity instance: which identity, on which basis tuple,
/// with the exact residual. Indices are 0-based internally and rendered
/// 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub identity: String,
    pub args: Vec<usize>,
    pub residual: Coeffs,
}

impl Violation {
    pub fn new(identity: impl Into<String>, args: Vec<usize>, residual: Coeffs) -> Self {
        Self {
            identity: identity.into(),
            args,
            residual,
        }
    }
}

/// Outcome of a checker: empty means every identity instance holds exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub check: String,
    pub violations: Vec<Violation>,
}

impl Report {
    pub fn new(check: impl Into<String>) -> Self {
        Self {
            check: check.into(),
            violations: Vec::new(),
        }
    }

    pub fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    /// Absorb another report, prefixing its identity names.
    pub fn merge_prefixed(&mut self, prefix: &str, other: Report) {
        for mut v in other.violations {
            v.identity = format!("{prefix}:{}", v.identity);
            self.violations.push(v);
        }
    }

    pub fn merge(&mut self, other: Report) {
        self.violations.extend(other.violations);
    }

    /// Violation counts per identity family.
    pub fn summary(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for v in &self.violations {
            *out.entry(v.identity.clone()).or_insert(0) += 1;
        }
        out
    }

    /// Keep only violations of one identity family.
    pub fn filtered(&self, identity: &str) -> Report {
        Report {
            check: self.check.clone(),
            violations: self
                .violations
                .iter()
                .filter(|v| v.identity == identity)
                .cloned()
                .collect(),
        }
    }

    pub fn identities(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.summary().into_keys().collect();
        ids.sort();
        ids
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return writeln!(f, "{}: ok", self.check);
        }
        writeln!(f, "{}: {} violation(s)", self.check, self.len())?;
        for v in &self.violations {
            let args: Vec<String> = v.args.iter().map(|i| (i + 1).to_string()).collect();
            let residual: Vec<String> = v
                .residual
                .iter()
                .map(|(i, c)| format!("e{}: {}", i + 1, format_rational(c)))
                .collect();
            writeln!(
                f,
                "  {} at ({}) residual [{}]",
                v.identity,
                args.join(","),
                residual.join(", ")
            )?;
        }
        Ok(())
    }
}
