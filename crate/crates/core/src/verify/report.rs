//! Residual records.

use alloc::{string::String, vec::Vec};

use num_complex::Complex64;

use crate::mt::{MtValue, SeriesTruncation};

/// Outcome of comparing both sides at a tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        }
    }
}

/// How one sub-evaluation was truncated.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationRecord {
    /// Which quantity, e.g. `"lhs"` or `"F+"`.
    pub term: String,
    pub route: String,
    pub caps: Vec<usize>,
    pub error_bound: f64,
    pub terms_used: u64,
}

impl TruncationRecord {
    pub fn from_series(term: &str, route: &str, t: &SeriesTruncation) -> Self {
        Self {
            term: term.into(),
            route: route.into(),
            caps: t.caps.clone(),
            error_bound: t.tail_bound,
            terms_used: t.terms_used,
        }
    }

    pub fn from_value(term: &str, v: &MtValue) -> Self {
        Self {
            term: term.into(),
            route: alloc::format!("{:?}", v.route).to_lowercase(),
            caps: Vec::new(),
            error_bound: v.error,
            terms_used: v.terms,
        }
    }
}

/// Both sides of an identity at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct FEReport {
    pub identity: String,
    pub point: Vec<Complex64>,
    /// Coefficient or character labels.
    pub labels: Vec<String>,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub abs_residual: f64,
    pub rel_residual: f64,
    /// Sum of the error bounds reported by the sub-evaluations.
    pub error_bound: f64,
    pub tolerance: f64,
    pub params: Vec<TruncationRecord>,
    pub verdict: Verdict,
}

impl FEReport {
    /// Fills in residuals and verdict.
    pub fn new(
        identity: &str,
        point: Vec<Complex64>,
        labels: Vec<String>,
        lhs: Complex64,
        rhs: Complex64,
        tolerance: f64,
        params: Vec<TruncationRecord>,
    ) -> Self {
        let abs_residual = (lhs - rhs).norm();
        let rel_residual = abs_residual / lhs.norm().max(rhs.norm()).max(1e-30);
        let error_bound = params.iter().map(|p| p.error_bound).sum();
        let verdict = if rel_residual <= tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            identity: identity.into(),
            point,
            labels,
            lhs,
            rhs,
            abs_residual,
            rel_residual,
            error_bound,
            tolerance,
            params,
            verdict,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn terms_used(&self) -> u64 {
        self.params.iter().map(|p| p.terms_used).sum()
    }
}
