//! Evaluated inequality reports, the unit of output of every verifier.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// One evaluated inequality: left side, right side, oriented gap and an
/// equality flag. `gap >= 0` always means "the inequality holds".
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// Oriented so that a nonnegative gap means the statement holds:
    /// `rhs - lhs` for upper bounds, `lhs - rhs` for lower bounds.
    pub gap: f64,
    pub equality: bool,
    pub eq_tol: f64,
    /// Numeric context: dimension, support size, displacement, norms.
    pub meta: BTreeMap<String, f64>,
}

impl InequalityReport {
    /// Report for an upper bound `lhs <= rhs`.
    pub fn upper(name: &str, lhs: f64, rhs: f64, eq_tol: f64) -> Self {
        Self::oriented(name, lhs, rhs, rhs - lhs, eq_tol)
    }

    /// Report for a lower bound `lhs >= rhs`.
    pub fn lower(name: &str, lhs: f64, rhs: f64, eq_tol: f64) -> Self {
        Self::oriented(name, lhs, rhs, lhs - rhs, eq_tol)
    }

    fn oriented(name: &str, lhs: f64, rhs: f64, gap: f64, eq_tol: f64) -> Self {
        let scale = lhs.abs().max(rhs.abs());
        InequalityReport {
            name: name.to_string(),
            lhs,
            rhs,
            gap,
            equality: gap.abs() <= eq_tol * scale,
            eq_tol,
            meta: BTreeMap::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: f64) -> Self {
        self.meta.insert(key.to_string(), value);
        self
    }

    /// True when the inequality is violated beyond `tol`.
    pub fn violated(&self, tol: f64) -> bool {
        self.gap < -tol
    }
}
