//! Report records shared by the check suites and the CLI runner.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CheckMode {
    #[serde(rename = "EXACT")]
    Exact,
    #[serde(rename = "MONTE_CARLO")]
    MonteCarlo,
}

/// One row of a per-lambda (or per-test-function) table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetailRow {
    pub lambda: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// Outcome of one inequality check: both sides, margin, and mode.
///
/// In EXACT mode `pass` means `margin >= -1e-9`; in MONTE_CARLO mode it
/// means CI-consistency (lhs ci_low <= rhs ci_high).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub mode: CheckMode,
    pub pass: bool,
    pub lhs_ci: Option<(f64, f64)>,
    pub rhs_ci: Option<(f64, f64)>,
    pub details: Vec<DetailRow>,
}

impl CheckReport {
    pub fn exact(name: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        CheckReport {
            name: name.into(),
            lhs,
            rhs,
            margin: rhs - lhs,
            mode: CheckMode::Exact,
            pass: rhs - lhs >= -tol,
            lhs_ci: None,
            rhs_ci: None,
            details: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchMode {
    #[serde(rename = "BISECTION")]
    Bisection,
}

/// Empirically minimal (or maximal) feasible constant for one instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub constant_name: String,
    pub value: f64,
    pub lambda_grid: Vec<f64>,
    pub search_mode: SearchMode,
    pub tolerance: f64,
}
