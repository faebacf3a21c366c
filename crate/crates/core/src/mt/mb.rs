//! The recursive Mellin-Barnes representation
//! `L_MT,r(s) = (2 pi i)^{-1} int_(c) Gamma(s_{r+1}+z) Gamma(-z) / Gamma(s_{r+1})
//!  L_MT,r-1(s_1,...,s_{r-1}, s_{r+1}+z) L_r(s_r - z) dz`
//! and the best-available evaluator built on it.
//!
//! Left poles: `z = -s_{r+1} - k` and, for `r = 2`, the poles of
//! `L_1(s_1 + s_{r+1} + z)`; for `r >= 3` the inner series must converge
//! absolutely on the line. Right poles: `z = j` and the poles of
//! `L_r(s_r - z)`. A line that does not separate the families is corrected
//! by the residues of the poles it leaves on the wrong side, which continues
//! the function meromorphically.

use alloc::{format, vec, vec::Vec};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::{Float, One, Zero};

use super::coeffs::CoefficientSequence;
use super::direct::{check_inputs, DirectPlan, DEFAULT_TERM_BUDGET, REGION_MARGIN};
use super::region::{in_convergence_region, min_subset_slack, MtPoint};
use crate::complex::{gamma_ratio, is_gamma_pole, log_gamma, pochhammer, real};
use crate::error::{Error, Result};
use crate::quad::line_integral;

/// Tolerance of inner series evaluated along a contour.
const INNER_TOL: f64 = 1e-11;
/// Tolerance for inner values that themselves need the contour.
const INNER_MB_TOL: f64 = 1e-8;
/// Distance kept between the contour and the inner convergence boundary.
const INNER_MARGIN: f64 = 0.3;
/// Closest admissible distance between the contour and a pole.
const MIN_POLE_DISTANCE: f64 = 0.02;

/// How a value of `L_MT,r` was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MtRoute {
    /// One-variable Dirichlet series (depth one or a polynomial top weight).
    Dirichlet,
    Direct,
    MellinBarnes,
}

/// A value of `L_MT,r` with an error estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct MtValue {
    pub value: Complex64,
    pub error: f64,
    pub route: MtRoute,
    /// Summed terms or quadrature nodes.
    pub terms: u64,
}

/// Outcome of a contour evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct MbEvaluation {
    pub value: Complex64,
    pub error: f64,
    pub abscissa: f64,
    pub height: f64,
    pub step: f64,
    /// Residues added for poles on the wrong side of the line.
    pub residues: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum PoleKind {
    /// `z = -s_{r+1} - k`.
    TopGamma(usize),
    /// `z = j`.
    NegGamma(usize),
    /// Pole of `L_r(s_r - z)`, index into its pole list.
    Last(usize),
    /// Pole of `L_1(s_1 + s_{r+1} + z)` for `r = 2`.
    First(usize),
}

#[derive(Debug, Clone, Copy)]
struct ContourPole {
    z: Complex64,
    kind: PoleKind,
    left: bool,
}

/// The integrand and its pole structure at a point.
struct Setup<'a> {
    p: &'a MtPoint,
    coeffs: &'a [CoefficientSequence],
    /// Largest admissible real part for the inner series, `r >= 3`.
    inner_bound: Option<f64>,
}

impl<'a> Setup<'a> {
    fn new(p: &'a MtPoint, coeffs: &'a [CoefficientSequence]) -> Self {
        let r = p.depth();
        let inner_bound = (r >= 3).then(|| {
            let x: Vec<f64> = (0..r - 1).map(|k| p.s()[k].re - coeffs[k].alpha()).collect();
            // inner slack at abscissa c is slack(0) + c
            let (slack, _) = min_subset_slack(&x, p.top().re);
            -slack
        });
        Self {
            p,
            coeffs,
            inner_bound,
        }
    }

    fn r(&self) -> usize {
        self.p.depth()
    }

    /// Poles with real part in `[lo, hi]`.
    fn poles(&self, lo: f64, hi: f64) -> Vec<ContourPole> {
        let (p, r) = (self.p, self.r());
        let top = p.top();
        let mut out = Vec::new();
        let mut k = 0usize;
        while -top.re - k as f64 >= lo {
            if -top.re - (k as f64) <= hi {
                out.push(ContourPole {
                    z: -top - k as f64,
                    kind: PoleKind::TopGamma(k),
                    left: true,
                });
            }
            k += 1;
        }
        let mut j = lo.max(0.0).ceil() as usize;
        while (j as f64) <= hi {
            out.push(ContourPole {
                z: real(j as f64),
                kind: PoleKind::NegGamma(j),
                left: false,
            });
            j += 1;
        }
        for (i, pole) in self.coeffs[r - 1].poles().iter().enumerate() {
            let z = p.last() - pole.location;
            if z.re >= lo && z.re <= hi {
                out.push(ContourPole {
                    z,
                    kind: PoleKind::Last(i),
                    left: false,
                });
            }
        }
        if r == 2 {
            for (i, pole) in self.coeffs[0].poles().iter().enumerate() {
                let z = pole.location - p.get(1) - top;
                if z.re >= lo && z.re <= hi {
                    out.push(ContourPole {
                        z,
                        kind: PoleKind::First(i),
                        left: true,
                    });
                }
            }
        }
        out
    }

    /// `L_MT,r-1(s_1, ..., s_{r-1}, w)`.
    fn inner_at(&self, w: Complex64) -> Result<MtValue> {
        let r = self.r();
        if r == 2 {
            let v = self.coeffs[0].l_eval(self.p.get(1) + w)?;
            return Ok(MtValue {
                value: v,
                error: 1e-13 * v.norm(),
                route: MtRoute::Dirichlet,
                terms: 1,
            });
        }
        match mt_eval(&self.p.inner(w), &self.coeffs[..r - 1], INNER_TOL) {
            Err(Error::Nonconvergence { .. }) => mt_eval(&self.p.inner(w), &self.coeffs[..r - 1], INNER_MB_TOL),
            other => other,
        }
    }

    fn last_l(&self, z: Complex64) -> Result<Complex64> {
        self.coeffs[self.r() - 1].l_eval(self.p.last() - z)
    }

    /// `Gamma(s_{r+1}+z) Gamma(-z) / Gamma(s_{r+1})`.
    fn gamma_part(&self, z: Complex64) -> Result<Complex64> {
        let top = self.p.top();
        gamma_ratio(&[top + z], &[]).and_then(|g| Ok(g * gamma_ratio(&[-z], &[top])?))
    }

    fn residue(&self, pole: &ContourPole) -> Result<(Complex64, f64)> {
        let (p, r) = (self.p, self.r());
        let top = p.top();
        let singular = |e: Error| Error::Singular(format!("colliding poles near z = {}: {e}", pole.z));
        match pole.kind {
            PoleKind::TopGamma(k) => {
                let w = pochhammer(top, k) * sign(k) / factorial(k);
                let inner = self.inner_at(real(-(k as f64)))?;
                let l = self.coeffs[r - 1].l_eval(p.last() + top + k as f64).map_err(singular)?;
                Ok((w * inner.value * l, (w * l).norm() * inner.error))
            }
            PoleKind::NegGamma(j) => {
                let w = pochhammer(top, j) * sign(j) / factorial(j);
                let inner = self.inner_at(top + j as f64).map_err(singular)?;
                let l = self.last_l(real(j as f64)).map_err(singular)?;
                Ok((w * inner.value * l, (w * l).norm() * inner.error))
            }
            PoleKind::Last(i) => {
                let res = self.coeffs[r - 1].poles()[i].residue;
                let g = self.gamma_part(pole.z).map_err(singular)?;
                let inner = self.inner_at(top + pole.z).map_err(singular)?;
                Ok((res * g * inner.value, (res * g).norm() * inner.error))
            }
            PoleKind::First(i) => {
                let res = self.coeffs[0].poles()[i].residue;
                let g = self.gamma_part(pole.z).map_err(singular)?;
                let l = self.last_l(pole.z).map_err(singular)?;
                Ok((res * g * l, 1e-13 * (res * g * l).norm()))
            }
        }
    }

    /// Strict window: the line separates the families and every factor
    /// converges absolutely on it.
    fn window(&self) -> (f64, f64) {
        let (p, r) = (self.p, self.r());
        let top = p.top().re;
        let x: Vec<f64> = (0..r - 1).map(|k| p.s()[k].re - self.coeffs[k].alpha()).collect();
        let (slack, _) = min_subset_slack(&x, top);
        let lo = (-top).max(-slack);
        let hi = (p.last().re - self.coeffs[r - 1].alpha() - 1.0).min(0.0);
        (lo, hi)
    }

    fn distance(&self, c: f64) -> f64 {
        let mut d = self
            .poles(c - 2.0, c + 2.0)
            .iter()
            .map(|q| (q.z.re - c).abs())
            .fold(2.0, f64::min);
        if let Some(b) = self.inner_bound {
            d = d.min(c - b);
        }
        d
    }

    fn integrate(&self, c: f64, height: f64, step: f64) -> Result<(Complex64, f64)> {
        let (p, r) = (self.p, self.r());
        let top = p.top();
        let lg_top = log_gamma(top)?;
        // an inner box sum planned once for the whole line
        let plan = if r >= 3 {
            DirectPlan::new(&p.inner(top + c), &self.coeffs[..r - 1], INNER_TOL, DEFAULT_TERM_BUDGET)
                .ok()
        } else {
            None
        };
        let inner_err = core::cell::Cell::new(0.0f64);
        let f = |t: f64| -> Result<Complex64> {
            let z = Complex64::new(c, t);
            let g = (log_gamma(top + z)? + log_gamma(-z)? - lg_top).exp();
            let inner = match &plan {
                Some(plan) => plan.sum(top + z),
                None => {
                    let v = self.inner_at(top + z)?;
                    inner_err.set(inner_err.get().max(v.error));
                    v.value
                }
            };
            Ok(g * inner * self.last_l(z)?)
        };
        let line = line_integral(f, height, step)?;
        let inner_bound = match &plan {
            Some(plan) => plan.truncation().tail_bound,
            None => inner_err.get(),
        };
        // the inner error is weighted by the line integral of |Gamma L_r|
        let weight = self.weight_l1(c, height)?;
        Ok((line.value, line.error + inner_bound * weight))
    }

    /// `(2 pi)^{-1} int |Gamma(s_{r+1}+z) Gamma(-z) L_r(s_r - z) / Gamma(s_{r+1})| dt`
    /// on a coarse grid.
    fn weight_l1(&self, c: f64, height: f64) -> Result<f64> {
        let top = self.p.top();
        let lg_top = log_gamma(top)?;
        let h = 0.25;
        let n = (height / h) as usize;
        let mut acc = 0.0;
        for j in 0..=2 * n {
            let t = -height + j as f64 * h;
            let z = Complex64::new(c, t);
            let g = (log_gamma(top + z)? + log_gamma(-z)? - lg_top).exp();
            acc += (g * self.last_l(z)?).norm();
        }
        Ok(2.0 * acc * h / (2.0 * core::f64::consts::PI))
    }

    fn height(&self) -> f64 {
        40.0 + 2.0 * self.p.s().iter().map(|z| z.im.abs()).sum::<f64>()
    }

    fn check_collisions(&self, lo: f64, hi: f64) -> Result<()> {
        let poles = self.poles(lo, hi);
        for a in poles.iter().filter(|q| q.left) {
            for b in poles.iter().filter(|q| !q.left) {
                if (a.z - b.z).norm() < 1e-9 {
                    return Err(Error::Singular(format!(
                        "left and right poles collide at z = {}",
                        a.z
                    )));
                }
            }
        }
        Ok(())
    }
}

fn sign(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|v| v as f64).product()
}

fn check_top(p: &MtPoint) -> Result<()> {
    if is_gamma_pole(p.top()) {
        return Err(Error::Singular(format!(
            "1/Gamma(s_(r+1)) vanishes at s_(r+1) = {}",
            p.top()
        )));
    }
    Ok(())
}

fn step_for(d: f64) -> f64 {
    (d / 6.0).min(0.05)
}

/// Open window `(lo, hi)` of abscissae for [`mt_via_mb`].
pub fn mb_window(p: &MtPoint, coeffs: &[CoefficientSequence]) -> Result<(f64, f64)> {
    check_inputs(p, coeffs, 1.0)?;
    if p.depth() < 2 {
        return Err(Error::InvalidInput("the contour needs depth at least two".into()));
    }
    Ok(Setup::new(p, coeffs).window())
}

/// Contour integral on `Re z = c` with `c` inside the window. Depth one is
/// `L_1(s_1 + s_2)` without quadrature.
pub fn mt_via_mb(
    p: &MtPoint,
    coeffs: &[CoefficientSequence],
    c: f64,
    height: f64,
    step: f64,
) -> Result<MbEvaluation> {
    check_inputs(p, coeffs, 1.0)?;
    if p.depth() == 1 {
        let value = coeffs[0].l_eval(p.get(1) + p.top())?;
        return Ok(MbEvaluation {
            value,
            error: 1e-13 * value.norm(),
            abscissa: c,
            height: 0.0,
            step: 0.0,
            residues: 0,
        });
    }
    if !(height > 1.0 && step > 0.0 && step < height && c.is_finite()) {
        return Err(Error::InvalidInput(format!("contour c = {c}, T = {height}, h = {step}")));
    }
    check_top(p)?;
    let setup = Setup::new(p, coeffs);
    let (lo, hi) = setup.window();
    if !(lo < hi) {
        return Err(Error::EmptyWindow(format!("({lo}, {hi})")));
    }
    if !(c > lo && c < hi) {
        return Err(Error::EmptyWindow(format!("c = {c} outside ({lo}, {hi})")));
    }
    let (value, error) = setup.integrate(c, height, step)?;
    Ok(MbEvaluation {
        value,
        error,
        abscissa: c,
        height,
        step,
        residues: 0,
    })
}

/// Chooses an abscissa with the fewest misplaced poles.
fn choose_abscissa(setup: &Setup) -> Result<(f64, Vec<ContourPole>)> {
    let p = setup.p;
    let mut marks: Vec<f64> = setup
        .poles(-1e3, 1e3)
        .iter()
        .map(|q| q.z.re)
        .filter(|x| x.abs() < 1e3)
        .collect();
    marks.push(0.0);
    marks.push(-p.top().re);
    let floor = setup.inner_bound.map(|b| b + INNER_MARGIN);
    if let Some(f) = floor {
        marks.push(f);
    }
    marks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let lo = marks[0] - 1.0;
    let hi = marks[marks.len() - 1] + 1.0;
    let mut all = setup.poles(lo - 2.0, hi + 2.0);
    all.sort_by(|a, b| a.z.re.partial_cmp(&b.z.re).unwrap());
    let mut cands = vec![lo, hi];
    for w in marks.windows(2) {
        cands.push(0.5 * (w[0] + w[1]));
    }
    if let Some(f) = floor {
        cands.push(f);
        cands.push(f + 0.25);
    }
    let mut best: Option<(usize, f64, f64, f64)> = None;
    for &c in &cands {
        if floor.is_some_and(|f| c < f) {
            continue;
        }
        let d = setup.distance(c);
        if d < MIN_POLE_DISTANCE {
            continue;
        }
        let crossed = all
            .iter()
            .filter(|q| (q.left && q.z.re > c) || (!q.left && q.z.re < c))
            .count();
        let key = (crossed, -d.min(0.25), c.abs());
        let better = match best {
            None => true,
            Some((bc, bd, ba, _)) => (key.0, key.1, key.2) < (bc, bd, ba),
        };
        if better {
            best = Some((key.0, key.1, key.2, c));
        }
    }
    let (_, _, _, c) = best.ok_or_else(|| {
        Error::EmptyWindow("no contour keeps its distance from the poles".into())
    })?;
    let crossed = all
        .into_iter()
        .filter(|q| (q.left && q.z.re > c) || (!q.left && q.z.re < c))
        .collect();
    Ok((c, crossed))
}

/// Meromorphic continuation through the contour integral: the abscissa is
/// chosen automatically and residues of misplaced poles are added.
pub fn mt_via_mb_continued(p: &MtPoint, coeffs: &[CoefficientSequence]) -> Result<MbEvaluation> {
    check_inputs(p, coeffs, 1.0)?;
    if p.depth() == 1 {
        return mt_via_mb(p, coeffs, 0.0, 0.0, 0.0);
    }
    check_top(p)?;
    let setup = Setup::new(p, coeffs);
    let (c, crossed) = choose_abscissa(&setup)?;
    let span = crossed.iter().map(|q| q.z.re.abs()).fold(c.abs(), f64::max) + 2.0;
    setup.check_collisions(-span, span)?;
    let height = setup.height();
    let step = step_for(setup.distance(c));
    let (mut value, mut error) = setup.integrate(c, height, step)?;
    for q in &crossed {
        let (v, e) = setup.residue(q)?;
        value += v;
        error += e;
    }
    Ok(MbEvaluation {
        value,
        error,
        abscissa: c,
        height,
        step,
        residues: crossed.len(),
    })
}

/// Multinomial expansion for a top exponent `-n`, `n = 0, 1, 2, ...`.
fn polynomial_top(p: &MtPoint, coeffs: &[CoefficientSequence], n: usize) -> Result<Complex64> {
    let r = p.depth();
    let mut acc = Complex64::zero();
    let mut parts = vec![0usize; r];
    fn rec(
        k: usize,
        left: usize,
        parts: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if k + 1 == parts.len() {
            parts[k] = left;
            out.push(parts.clone());
            return;
        }
        for v in 0..=left {
            parts[k] = v;
            rec(k + 1, left - v, parts, out);
        }
    }
    let mut all = Vec::new();
    rec(0, n, &mut parts, &mut all);
    for parts in all {
        let mut term = real(factorial(n));
        for (j, &nj) in parts.iter().enumerate() {
            term *= coeffs[j].l_eval(p.get(j + 1) - nj as f64)? / factorial(nj);
        }
        acc += term;
    }
    Ok(acc)
}

/// `L_MT,r(s)` by the cheapest route that meets `tol` (absolute, or
/// relative for values above one).
pub fn mt_eval(p: &MtPoint, coeffs: &[CoefficientSequence], tol: f64) -> Result<MtValue> {
    check_inputs(p, coeffs, tol)?;
    let r = p.depth();
    if r == 1 {
        let value = coeffs[0].l_eval(p.get(1) + p.top())?;
        return Ok(MtValue {
            value,
            error: 1e-13 * value.norm(),
            route: MtRoute::Dirichlet,
            terms: 1,
        });
    }
    let top = p.top();
    if top.im == 0.0 && top.re <= 0.0 && top.re == top.re.round() && top.re > -64.0 {
        let value = polynomial_top(p, coeffs, (-top.re) as usize)?;
        return Ok(MtValue {
            value,
            error: 1e-13 * value.norm(),
            route: MtRoute::Dirichlet,
            terms: 1,
        });
    }
    let alphas: Vec<f64> = coeffs.iter().map(|a| a.alpha()).collect();
    if in_convergence_region(p, &alphas)?.slack >= REGION_MARGIN {
        if let Ok(plan) = DirectPlan::new(p, coeffs, tol, DEFAULT_TERM_BUDGET) {
            return Ok(MtValue {
                value: plan.sum(top),
                error: plan.truncation().tail_bound,
                route: MtRoute::Direct,
                terms: plan.terms(),
            });
        }
    }
    let mb = mt_via_mb_continued(p, coeffs)?;
    if mb.error > tol * mb.value.norm().max(1.0) {
        return Err(Error::Nonconvergence {
            what: "Mellin-Barnes continuation",
            detail: format!("error {} above tolerance {tol}", mb.error),
        });
    }
    Ok(MtValue {
        value: mb.value,
        error: mb.error,
        route: MtRoute::MellinBarnes,
        terms: (2.0 * mb.height / mb.step).round() as u64 + 1,
    })
}
