//! The `report.json` output format.

use mtds_core::verify::{GridRecord, HyperplaneWitness, Outcome, Summary, TruncationRecord};
use serde::{Deserialize, Serialize};

use crate::grid::GridFile;
use crate::json::{self, Real, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointVerdict {
    Pass,
    Fail,
    Skipped,
    Refused,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Param {
    pub term: String,
    pub route: String,
    pub caps: Vec<usize>,
    pub error_bound: Real,
    pub terms_used: u64,
}

impl From<&TruncationRecord> for Param {
    fn from(t: &TruncationRecord) -> Self {
        Self {
            term: t.term.clone(),
            route: t.route.clone(),
            caps: t.caps.clone(),
            error_bound: Real(t.error_bound),
            terms_used: t.terms_used,
        }
    }
}

/// Pole hyperplane `sum_{j in subset} s_j + s_top = target`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub subset: Vec<usize>,
    pub h: usize,
    pub l: u64,
    pub target: Real,
    pub distance: Real,
}

impl From<&HyperplaneWitness> for Witness {
    fn from(w: &HyperplaneWitness) -> Self {
        Self { subset: w.subset.clone(), h: w.h, l: w.l, target: Real(w.target), distance: Real(w.distance) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub index: usize,
    pub s: Vec<Scalar>,
    pub labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lhs: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rhs: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs_residual: Option<Real>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_residual: Option<Real>,
    /// Sum of the sub-evaluation bounds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_bound: Option<Real>,
    #[serde(default)]
    pub params: Vec<Param>,
    pub verdict: PointVerdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl PointReport {
    /// `labels` is used when the record carries none of its own.
    pub fn from_record(rec: &GridRecord, labels: &[String]) -> Self {
        let mut out = Self {
            index: rec.index,
            s: rec.point.iter().copied().map(Scalar).collect(),
            labels: labels.to_vec(),
            lhs: None,
            rhs: None,
            abs_residual: None,
            rel_residual: None,
            error_bound: None,
            params: Vec::new(),
            verdict: PointVerdict::Refused,
            reason: None,
            witness: None,
        };
        match &rec.outcome {
            Outcome::Report(r) => {
                out.s = r.point.iter().copied().map(Scalar).collect();
                out.labels = r.labels.clone();
                out.lhs = Some(Scalar(r.lhs));
                out.rhs = Some(Scalar(r.rhs));
                out.abs_residual = Some(Real(r.abs_residual));
                out.rel_residual = Some(Real(r.rel_residual));
                out.error_bound = Some(Real(r.error_bound));
                out.params = r.params.iter().map(Param::from).collect();
                out.verdict = if r.passed() { PointVerdict::Pass } else { PointVerdict::Fail };
            }
            Outcome::Skipped { reason, witness } => {
                out.verdict = PointVerdict::Skipped;
                out.reason = Some(reason.clone());
                out.witness = witness.as_ref().map(Witness::from);
            }
            Outcome::Refused { reason } => out.reason = Some(reason.clone()),
        }
        out
    }

    pub fn is_failure(&self) -> bool {
        matches!(self.verdict, PointVerdict::Fail | PointVerdict::Refused)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub points: usize,
    pub passed: usize,
    pub failed: usize,
    pub refused: usize,
    pub skipped: usize,
    pub pass_rate: Real,
    pub max_abs_residual: Real,
    pub max_rel_residual: Real,
    pub total_terms: u64,
}

impl From<&Summary> for SummaryReport {
    fn from(s: &Summary) -> Self {
        Self {
            points: s.points,
            passed: s.passed,
            failed: s.failed,
            refused: s.refused,
            skipped: s.skipped,
            pass_rate: Real(s.pass_rate),
            max_abs_residual: Real(s.max_abs_residual),
            max_rel_residual: Real(s.max_rel_residual),
            total_terms: s.total_terms,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KmtEcho {
    pub q: u64,
    pub chi1: usize,
    pub chi2: usize,
    pub k: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plane: Option<String>,
}

/// The settings a run actually used, defaults filled in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub identity: String,
    pub coeffs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kmt: Option<KmtEcho>,
    pub tol: Real,
    pub band: Real,
    pub grid: GridFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub identity: String,
    pub config_echo: ConfigEcho,
    pub points: Vec<PointReport>,
    pub summary: SummaryReport,
}

impl Report {
    pub fn to_json(&self) -> String {
        json::to_string(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("report: {e}"))
    }

    /// The failed or refused point with the largest relative residual;
    /// refusals rank first.
    pub fn worst_offender(&self) -> Option<&PointReport> {
        let key = |p: &PointReport| match p.verdict {
            PointVerdict::Refused => f64::INFINITY,
            _ => p.rel_residual.map_or(f64::INFINITY, |r| if r.0.is_nan() { f64::INFINITY } else { r.0 }),
        };
        self.points
            .iter()
            .filter(|p| p.is_failure())
            .fold(None, |best: Option<&PointReport>, p| match best {
                Some(b) if key(b) >= key(p) => Some(b),
                _ => Some(p),
            })
    }
}
