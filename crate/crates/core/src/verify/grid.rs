//! Grid runs: one record per point, in grid order.

use alloc::{format, string::String, vec, vec::Vec};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::checks::{
    check_cm, check_kmt, check_lemma_34_1, check_thm_12, check_thm_21, check_thm_22, reflect, Hyperplane,
    KmtInput,
};
use super::locus::{singular_locus, HyperplaneWitness, SingularLocusSpec};
use super::report::FEReport;
use crate::complex::real;
use crate::error::{Error, Result};
use crate::mt::{CoefficientSequence, MtPoint, MAX_DEPTH};
use crate::zeta_l::DirichletCharacter;

/// The identities a grid can be run against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identity {
    Lemma34_1,
    Thm21,
    Thm22,
    Thm12,
    Cm,
    Kmt,
}

impl Identity {
    pub const ALL: [Identity; 6] = [
        Identity::Lemma34_1,
        Identity::Thm21,
        Identity::Thm22,
        Identity::Thm12,
        Identity::Cm,
        Identity::Kmt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::Lemma34_1 => "lemma34_1",
            Identity::Thm21 => "thm21",
            Identity::Thm22 => "thm22",
            Identity::Thm12 => "thm12",
            Identity::Cm => "cm",
            Identity::Kmt => "kmt",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|i| i.name() == text)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|i| i.name()).collect();
                Error::InvalidInput(format!("identity: unknown `{text}`, expected one of {}", names.join(", ")))
            })
    }
}

/// `start, start + step, ...` up to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl AxisRange {
    pub fn values(&self) -> Result<Vec<f64>> {
        let AxisRange { start, stop, step } = *self;
        if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
            return Err(Error::InvalidInput("range bounds must be finite".into()));
        }
        if stop < start {
            return Ok(Vec::new());
        }
        if step <= 0.0 {
            if start == stop {
                return Ok(vec![start]);
            }
            return Err(Error::InvalidInput(format!("step must be positive, got {step}")));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
        Ok((0..n).map(|k| start + k as f64 * step).collect())
    }
}

/// One coordinate: a range of real parts and optionally of imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct GridAxis {
    pub re: AxisRange,
    pub im: Option<AxisRange>,
}

impl GridAxis {
    pub fn real(start: f64, stop: f64, step: f64) -> Self {
        Self {
            re: AxisRange { start, stop, step },
            im: None,
        }
    }

    pub fn values(&self) -> Result<Vec<Complex64>> {
        let re = self.re.values()?;
        let im = match &self.im {
            Some(r) => r.values()?,
            None => vec![0.0],
        };
        Ok(re
            .iter()
            .flat_map(|&x| im.iter().map(move |&y| Complex64::new(x, y)))
            .collect())
    }
}

/// Cartesian product of the axes (first axis outermost) followed by the
/// explicit points.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Grid {
    pub axes: Vec<GridAxis>,
    pub points: Vec<Vec<Complex64>>,
}

impl Grid {
    pub fn expand(&self) -> Result<Vec<Vec<Complex64>>> {
        let mut out: Vec<Vec<Complex64>> = Vec::new();
        if !self.axes.is_empty() {
            out.push(Vec::new());
            for (i, axis) in self.axes.iter().enumerate() {
                let vals = axis
                    .values()
                    .map_err(|e| Error::InvalidInput(format!("grid.axes[{i}]: {e}")))?;
                out = out
                    .iter()
                    .flat_map(|prefix| {
                        vals.iter().map(move |&v| {
                            let mut p = prefix.clone();
                            p.push(v);
                            p
                        })
                    })
                    .collect();
            }
        }
        out.extend(self.points.iter().cloned());
        Ok(out)
    }
}

/// Character pair and hyperplane of a double L-function run.
#[derive(Debug, Clone, PartialEq)]
pub struct KmtSetup {
    pub chi1: DirichletCharacter,
    pub chi2: DirichletCharacter,
    pub k: i64,
    pub plane: Option<Hyperplane>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub identity: Identity,
    /// One sequence per slot; a single sequence `A` for `cm`, none for `kmt`.
    pub coeffs: Vec<CoefficientSequence>,
    pub kmt: Option<KmtSetup>,
    pub grid: Grid,
    pub tol: f64,
    /// Singular-locus band.
    pub band: f64,
}

impl RunConfig {
    /// Number of coordinates per grid point.
    pub fn point_len(&self) -> Option<usize> {
        match self.identity {
            Identity::Cm => Some(2),
            Identity::Kmt => None,
            _ => Some(self.coeffs.len() + 1),
        }
    }

    /// Field-level validation of everything that does not depend on a point.
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: String| Err(Error::InvalidInput(format!("{field}: {msg}")));
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return bad("tol", format!("must be positive, got {}", self.tol));
        }
        if !(self.band.is_finite() && self.band > 0.0) {
            return bad("band", format!("must be positive, got {}", self.band));
        }
        let r = self.coeffs.len();
        match self.identity {
            Identity::Lemma34_1 | Identity::Thm21 | Identity::Thm22 | Identity::Thm12 => {
                if !(2..=MAX_DEPTH).contains(&r) {
                    return bad("coeffs", format!("need 2 to {MAX_DEPTH} sequences, got {r}"));
                }
            }
            Identity::Cm => {
                if r != 1 {
                    return bad("coeffs", format!("cm takes exactly one sequence, got {r}"));
                }
            }
            Identity::Kmt => {
                if r != 0 {
                    return bad("coeffs", "kmt takes its characters from chi1/chi2".into());
                }
            }
        }
        match self.identity {
            Identity::Lemma34_1 | Identity::Thm21 if !self.coeffs[r - 1].is_ones() => {
                return bad("coeffs", format!("last sequence must be ones, got {}", self.coeffs[r - 1].label()));
            }
            Identity::Thm22 => match self.coeffs[r - 1].as_character() {
                Some(chi) if chi.modulus() > 1 && chi.is_primitive() => {}
                _ => {
                    return bad(
                        "coeffs",
                        format!("last sequence must be a primitive character mod q > 1, got {}", self.coeffs[r - 1].label()),
                    )
                }
            },
            Identity::Thm12 if !self.coeffs.iter().all(|a| a.is_ones()) => {
                return bad("coeffs", "every sequence must be ones".into());
            }
            Identity::Kmt => {
                let Some(k) = &self.kmt else {
                    return bad("kmt", "missing characters and hyperplane".into());
                };
                for (field, chi) in [("chi1", &k.chi1), ("chi2", &k.chi2)] {
                    if !(chi.modulus() > 1 && chi.is_primitive()) {
                        return bad(field, format!("character mod {} index {} is not primitive", chi.modulus(), chi.index()));
                    }
                }
                if k.chi1.modulus() != k.chi2.modulus() {
                    return bad("chi2", "moduli differ".into());
                }
                let product: i32 = if (k.chi1.parity() + k.chi2.parity()) % 2 == 0 { 1 } else { -1 };
                let natural = if product == 1 { Hyperplane::Odd } else { Hyperplane::Even };
                if k.plane.is_some_and(|p| p != natural) {
                    return Err(Error::ParityMismatch { product });
                }
            }
            _ => {}
        }
        let len = self.point_len();
        for (i, axis) in self.grid.axes.iter().enumerate() {
            axis.values().map_err(|e| Error::InvalidInput(format!("grid.axes[{i}]: {e}")))?;
        }
        let axes = self.grid.axes.len();
        if axes > 0 {
            let ok = match len {
                Some(n) => axes == n,
                None => axes == 1 || axes == 2,
            };
            if !ok {
                return bad("grid.axes", format!("{axes} axes for points of length {}", len.map_or("1 or 2".into(), |n| format!("{n}"))));
            }
        }
        for (i, p) in self.grid.points.iter().enumerate() {
            let ok = match len {
                Some(n) => p.len() == n,
                None => p.len() == 1 || p.len() == 2,
            };
            if !ok {
                return bad(&format!("grid.points[{i}]"), format!("wrong number of coordinates ({})", p.len()));
            }
            if p.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return bad(&format!("grid.points[{i}]"), "non-finite coordinate".into());
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Report(FEReport),
    /// Point in a singular band or outside a route's hypotheses.
    Skipped {
        reason: String,
        witness: Option<HyperplaneWitness>,
    },
    /// A sub-evaluation refused (budget, convergence); counts as a failure.
    Refused { reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridRecord {
    pub index: usize,
    pub point: Vec<Complex64>,
    pub outcome: Outcome,
}

impl GridRecord {
    pub fn passed(&self) -> bool {
        matches!(&self.outcome, Outcome::Report(r) if r.passed())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Summary {
    pub points: usize,
    pub passed: usize,
    pub failed: usize,
    pub refused: usize,
    pub skipped: usize,
    /// `passed / (points - skipped)`, one when nothing was evaluated.
    pub pass_rate: f64,
    pub max_abs_residual: f64,
    pub max_rel_residual: f64,
    pub total_terms: u64,
}

fn is_precondition(e: &Error) -> bool {
    matches!(
        e,
        Error::Singular(_)
            | Error::Hypothesis(_)
            | Error::Region { .. }
            | Error::NTooSmall { .. }
            | Error::GammaPole { .. }
            | Error::Pole { .. }
            | Error::HyperplaneMismatch { .. }
            | Error::EmptyWindow(_)
    )
}

/// Points whose neighbourhood of a pole hyperplane the identity touches.
fn guarded_points(cfg: &RunConfig, p: &[Complex64]) -> Result<Vec<(MtPoint, Vec<CoefficientSequence>)>> {
    Ok(match cfg.identity {
        Identity::Kmt => Vec::new(),
        Identity::Cm => {
            let q = MtPoint::new(vec![real(0.0), p[0], p[1]])?;
            vec![(q, vec![cfg.coeffs[0].clone(), CoefficientSequence::ones()])]
        }
        Identity::Thm12 => {
            let q = MtPoint::new(p.to_vec())?;
            let refl = reflect(&q);
            vec![(q, cfg.coeffs.clone()), (refl, cfg.coeffs.clone())]
        }
        _ => vec![(MtPoint::new(p.to_vec())?, cfg.coeffs.clone())],
    })
}

fn run_check(cfg: &RunConfig, p: &[Complex64]) -> Result<FEReport> {
    match cfg.identity {
        Identity::Lemma34_1 => check_lemma_34_1(&MtPoint::new(p.to_vec())?, &cfg.coeffs, cfg.tol),
        Identity::Thm21 => check_thm_21(&MtPoint::new(p.to_vec())?, &cfg.coeffs, cfg.tol),
        Identity::Thm22 => check_thm_22(&MtPoint::new(p.to_vec())?, &cfg.coeffs, cfg.tol),
        Identity::Thm12 => check_thm_12(&MtPoint::new(p.to_vec())?, cfg.tol),
        Identity::Cm => check_cm(p[0], p[1], &cfg.coeffs[0], cfg.tol),
        Identity::Kmt => {
            let k = cfg.kmt.as_ref().expect("validated");
            check_kmt(
                &KmtInput {
                    s1: p[0],
                    s2: p.get(1).copied(),
                    k: k.k,
                    plane: k.plane,
                    chi1: k.chi1.clone(),
                    chi2: k.chi2.clone(),
                },
                cfg.tol,
            )
        }
    }
}

/// Record for one point. The config must have passed [`RunConfig::validate`].
pub fn evaluate_point(cfg: &RunConfig, index: usize, point: &[Complex64]) -> GridRecord {
    let outcome = (|| -> Result<Outcome> {
        for (q, coeffs) in guarded_points(cfg, point)? {
            let spec = SingularLocusSpec::from_coeffs(&coeffs, cfg.band)?;
            if let Some(w) = singular_locus(&spec, &q) {
                return Ok(Outcome::Skipped {
                    reason: format!("within {} of {w}", cfg.band),
                    witness: Some(w),
                });
            }
        }
        run_check(cfg, point).map(Outcome::Report)
    })();
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) if is_precondition(&e) => Outcome::Skipped {
            reason: format!("{e}"),
            witness: None,
        },
        Err(e) => Outcome::Refused { reason: format!("{e}") },
    };
    GridRecord {
        index,
        point: point.to_vec(),
        outcome,
    }
}

pub fn summarize(records: &[GridRecord]) -> Summary {
    let mut s = Summary {
        points: records.len(),
        ..Summary::default()
    };
    for rec in records {
        match &rec.outcome {
            Outcome::Report(r) => {
                if r.passed() {
                    s.passed += 1;
                } else {
                    s.failed += 1;
                }
                s.max_abs_residual = s.max_abs_residual.max(r.abs_residual);
                s.max_rel_residual = s.max_rel_residual.max(r.rel_residual);
                s.total_terms += r.terms_used();
            }
            Outcome::Skipped { .. } => s.skipped += 1,
            Outcome::Refused { .. } => s.refused += 1,
        }
    }
    let evaluated = s.points - s.skipped;
    s.pass_rate = if evaluated == 0 {
        1.0
    } else {
        s.passed as f64 / evaluated as f64
    };
    s
}

/// Validates the config and evaluates every grid point in order.
pub fn run_grid(cfg: &RunConfig) -> Result<(Vec<GridRecord>, Summary)> {
    cfg.validate()?;
    let points = cfg.grid.expand()?;
    let records: Vec<GridRecord> = points
        .iter()
        .enumerate()
        .map(|(i, p)| evaluate_point(cfg, i, p))
        .collect();
    let summary = summarize(&records);
    Ok((records, summary))
}
