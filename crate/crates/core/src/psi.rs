//! Tricomi's confluent hypergeometric function `Psi(a, c; x)` (Tricomi `U`)
//! by a ray integral, a Mellin-Barnes line integral and the large-`|x|`
//! asymptotic expansion, with the reflection
//! `Psi(a, c; x) = x^{1-c} Psi(a-c+1, 2-c; x)`.
//!
//! The Mellin-Barnes kernel is
//! `Gamma(a+z) Gamma(-z) Gamma(1-c-z) / (Gamma(a) Gamma(a-c+1)) x^z`.
//! Its poles split into a left family `z = -a-k` and a right family
//! `z = j`, `z = 1-c+j`. [`psi_mellin_barnes`] integrates on a line that
//! separates them; [`psi_mellin_barnes_shifted`] accepts any line and adds
//! the residues of the poles it crosses, and [`psi_remainder`] uses this to
//! compute the remainder of the asymptotic expansion directly.

use alloc::{format, string::String, vec::Vec};
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::{Float, Zero};

use crate::complex::{is_gamma_pole, log_gamma, principal_power, BranchedBase};
use crate::error::{Error, Result};
use crate::quad::line_integral;

/// `|x|` from which [`psi`] tries the asymptotic expansion first.
pub const ASYMPTOTIC_THRESHOLD: f64 = 4.0 * PI;
/// Smallest `|x|` accepted by [`psi_asymptotic`].
pub const ASYMPTOTIC_MIN_MODULUS: f64 = 2.0 * PI;
/// Relative slack on that floor, so `2 pi` typed to a few digits qualifies.
pub const MODULUS_SLACK: f64 = 1e-6;
/// Distance kept from `|arg x| = 3 pi / 2`, where the kernel stops decaying.
pub const ARG_MARGIN: f64 = 0.1;
pub const DEFAULT_STEP: f64 = 0.05;
pub const DEFAULT_NODES: usize = 256;
/// Expansion lengths scanned when minimizing the remainder bound.
pub const ASYMPTOTIC_SCAN: (usize, usize) = (5, 40);

const EPS: f64 = f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Integral,
    MellinBarnes,
    Asymptotic,
    /// Evaluated at the reflected parameters; `params` describe that evaluation.
    Reflected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PsiParams {
    Integral {
        phi: f64,
        nodes: usize,
    },
    /// `residues` counts the pole contributions added to the line integral.
    MellinBarnes {
        gamma: f64,
        height: f64,
        step: f64,
        residues: usize,
    },
    Asymptotic {
        terms: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiEvaluation {
    pub value: Complex64,
    pub route: Route,
    pub params: PsiParams,
    pub error_bound: f64,
    /// The bound is an estimate rather than a proof.
    pub heuristic: bool,
}

fn check_argument(x: &BranchedBase) -> Result<()> {
    if x.value.is_zero() {
        return Err(Error::ZeroArgument);
    }
    if x.declared_arg.abs() >= 1.5 * PI - ARG_MARGIN {
        return Err(Error::Divergence {
            arg: x.declared_arg,
        });
    }
    Ok(())
}

fn nonpositive_integer(z: Complex64) -> Option<usize> {
    if is_gamma_pole(z) {
        Some((-z.re.round()).max(0.0) as usize)
    } else {
        None
    }
}

/// Degree of `Psi(a, c; x)` as a polynomial in `1/x` (times `x^{-a}`) when
/// `a` or `a-c+1` is a non-positive integer.
pub fn terminating_degree(a: Complex64, c: Complex64) -> Option<usize> {
    match (nonpositive_integer(a), nonpositive_integer(a - c + 1.0)) {
        (Some(m), Some(n)) => Some(m.min(n)),
        (m, n) => m.or(n),
    }
}

/// Terms `k = from..to` of the expansion, with the sum of their moduli.
fn expansion_terms(
    a: Complex64,
    c: Complex64,
    x: &BranchedBase,
    from: usize,
    to: usize,
) -> (Complex64, f64) {
    let b = a - c + 1.0;
    let mut term = (-a * x.ln()).exp();
    let mut sum = Complex64::zero();
    let mut abs = 0.0;
    for k in 0..to {
        if k >= from {
            sum += term;
            abs += term.norm();
        }
        let kf = k as f64;
        term *= -(a + kf) * (b + kf) / ((kf + 1.0) * x.value);
    }
    (sum, abs)
}

fn exact_polynomial(a: Complex64, c: Complex64, x: &BranchedBase, degree: usize) -> PsiEvaluation {
    let (value, abs) = expansion_terms(a, c, x, 0, degree + 1);
    PsiEvaluation {
        value,
        route: Route::Asymptotic,
        params: PsiParams::Asymptotic { terms: degree + 1 },
        error_bound: (8.0 * EPS * abs).max(f64::MIN_POSITIVE),
        heuristic: false,
    }
}

/// Remainder estimate for the `n`-term expansion:
/// `|(a-c+1)_n| Gamma(Re a + n) / (n! |Gamma(a)|) e^{pi (|Im a| + |Im(a-c)|)/2} |x|^{-Re a - n}`,
/// with the implied constant taken as 1.
pub fn asymptotic_bound(a: Complex64, c: Complex64, x: &BranchedBase, n: usize) -> Result<f64> {
    let b = a - c + 1.0;
    let nf = n as f64;
    if !(a.re + nf > 0.0 && b.re >= -nf) {
        return Err(Error::BoundInvalid(format!(
            "need Re a > -N and Re(a-c+1) >= -N; a = {a}, a-c+1 = {b}, N = {n}"
        )));
    }
    if is_gamma_pole(a) {
        return Ok(0.0);
    }
    let mut ln = 0.0;
    for k in 0..n {
        let f = (b + k as f64).norm();
        if f == 0.0 {
            return Ok(0.0);
        }
        ln += f.ln();
    }
    ln += log_gamma(Complex64::new(a.re + nf, 0.0))?.re - log_gamma(Complex64::new(nf + 1.0, 0.0))?.re;
    ln -= log_gamma(a)?.re;
    ln += PI * (a.im.abs() + (a - c).im.abs()) / 2.0;
    ln -= (a.re + nf) * x.norm().ln();
    Ok(ln.exp())
}

/// `sum_{k<N} (-1)^k (a)_k (a-c+1)_k / k! x^{-a-k}` with the remainder bound.
pub fn psi_asymptotic(
    a: Complex64,
    c: Complex64,
    x: &BranchedBase,
    n: usize,
) -> Result<PsiEvaluation> {
    check_argument(x)?;
    if n == 0 {
        return Err(Error::InvalidInput("expansion length must be positive".into()));
    }
    if x.norm() < ASYMPTOTIC_MIN_MODULUS * (1.0 - MODULUS_SLACK) {
        return Err(Error::Validity(format!(
            "asymptotic route needs |x| >= 2 pi, got {}",
            x.norm()
        )));
    }
    let bound = asymptotic_bound(a, c, x, n)?;
    let (value, abs) = expansion_terms(a, c, x, 0, n);
    Ok(PsiEvaluation {
        value,
        route: Route::Asymptotic,
        params: PsiParams::Asymptotic { terms: n },
        error_bound: (bound + 8.0 * EPS * abs).max(f64::MIN_POSITIVE),
        heuristic: true,
    })
}

/// Expansion length in the scan range with the smallest remainder bound.
pub fn best_expansion_length(a: Complex64, c: Complex64, x: &BranchedBase) -> Result<usize> {
    let (lo, hi) = ASYMPTOTIC_SCAN;
    let mut best: Option<(usize, f64)> = None;
    for n in lo..=hi {
        if let Ok(b) = asymptotic_bound(a, c, x, n) {
            if best.is_none_or(|(_, bb)| b < bb) {
                best = Some((n, b));
            }
        }
    }
    best.map(|(n, _)| n).ok_or_else(|| {
        Error::BoundInvalid(format!("no valid expansion length in {lo}..={hi} for a = {a}, c = {c}"))
    })
}

/// `(a-c+1, 2-c, x^{1-c})`: parameters and prefactor of the reflection.
pub fn psi_reflect(
    a: Complex64,
    c: Complex64,
    x: &BranchedBase,
) -> Result<(Complex64, Complex64, Complex64)> {
    if x.value.is_zero() {
        return Err(Error::ZeroArgument);
    }
    Ok((a - c + 1.0, 2.0 - c, principal_power(x, 1.0 - c)?))
}

/// Default ray angle: half-way into the wedge `|phi + arg x| < pi/2`.
pub fn default_phi(x: Complex64) -> f64 {
    let arg = x.arg();
    let phi = -arg / 2.0;
    let limit = PI / 2.0 - ARG_MARGIN;
    (phi + arg).clamp(-limit, limit) - arg
}

fn ln_1p(w: Complex64) -> Complex64 {
    if w.norm() < 1e-4 {
        w - w * w / 2.0 + w * w * w / 3.0
    } else {
        (w + 1.0).ln()
    }
}

/// `Gamma(a)^{-1} int_0^{inf e^{i phi}} e^{-xy} y^{a-1} (1+y)^{c-a-1} dy` by
/// double-exponential quadrature with `nodes` and `2 nodes` points; the
/// difference of the two is the reported estimate.
pub fn psi_integral(
    a: Complex64,
    c: Complex64,
    x: Complex64,
    phi: f64,
    nodes: usize,
) -> Result<PsiEvaluation> {
    if x.is_zero() {
        return Err(Error::ZeroArgument);
    }
    if !(a.re > 0.0) {
        return Err(Error::Validity(format!("integral route needs Re a > 0, got a = {a}")));
    }
    if !(phi.abs() < PI && (phi + x.arg()).abs() < PI / 2.0) {
        return Err(Error::Validity(format!(
            "ray angle {phi} outside the wedge for arg x = {}",
            x.arg()
        )));
    }
    if nodes < 8 {
        return Err(Error::InvalidInput(format!("need at least 8 nodes, got {nodes}")));
    }
    let rot = Complex64::new(phi.cos(), phi.sin());
    let kappa = x.norm() * (phi + x.arg()).cos();
    // y = e^{i phi} u with u = e^{pi/2 sinh t} / kappa
    let ln_kappa = kappa.ln();
    let t_lo = -((2.0 / PI) * 40.0 / a.re).asinh();
    let v_hi: f64 = 60.0 + 3.0 * (a.re.abs() + c.re.abs());
    let t_hi = ((2.0 / PI) * v_hi.ln()).asinh();
    let xr = x * rot;
    let log_front = Complex64::i() * phi * a;
    let g = |t: f64| -> Complex64 {
        let ln_u = PI / 2.0 * t.sinh() - ln_kappa;
        let u = ln_u.exp();
        let w = rot * u;
        (-xr * u + a * ln_u + log_front + (c - a - 1.0) * ln_1p(w)).exp() * (PI / 2.0 * t.cosh())
    };
    let trapezoid = |n: usize| -> (Complex64, f64) {
        let h = (t_hi - t_lo) / n as f64;
        let ends = (g(t_lo) + g(t_hi)) * 0.5;
        let mut s = ends;
        let mut l1 = ends.norm();
        for k in 1..n {
            let v = g(t_lo + k as f64 * h);
            s += v;
            l1 += v.norm();
        }
        (s * h, l1 * h)
    };
    let (coarse, _) = trapezoid(nodes);
    let (fine, l1) = trapezoid(2 * nodes);
    let inv = log_gamma(a).map(|l| (-l).exp())?;
    let value = fine * inv;
    let diff = ((fine - coarse) * inv).norm();
    if !(value.re.is_finite() && value.im.is_finite()) || diff > 1e-3 * value.norm() {
        return Err(Error::Nonconvergence {
            what: "Psi ray integral",
            detail: format!("node doubling changed the value by {diff:e} at a = {a}, c = {c}, x = {x}"),
        });
    }
    Ok(PsiEvaluation {
        value,
        route: Route::Integral,
        params: PsiParams::Integral {
            phi,
            nodes: 2 * nodes,
        },
        error_bound: (diff + 64.0 * EPS * l1 * inv.norm()).max(f64::MIN_POSITIVE),
        heuristic: true,
    })
}

struct Kernel {
    a: Complex64,
    c: Complex64,
    lx: Complex64,
    shift: Complex64,
}

impl Kernel {
    fn new(a: Complex64, c: Complex64, x: &BranchedBase) -> Result<Self> {
        let shift = -log_gamma(a)? - log_gamma(a - c + 1.0)?;
        Ok(Self {
            a,
            c,
            lx: x.ln(),
            shift,
        })
    }

    fn eval(&self, z: Complex64) -> Result<Complex64> {
        let l = log_gamma(self.a + z)? + log_gamma(-z)? + log_gamma(1.0 - self.c - z)?;
        Ok((l + self.shift + z * self.lx).exp())
    }
}

/// Height covering the kernel's decay: `40 + 2|Im a| + 2|Im c|`, extended
/// when `|arg x|` approaches `3 pi / 2`.
pub fn default_height(a: Complex64, c: Complex64, arg: f64) -> f64 {
    let rate = 1.5 * PI - arg.abs();
    (40.0 + 2.0 * a.im.abs() + 2.0 * c.im.abs()).max(45.0 / rate)
}

/// Open interval of abscissae separating the two pole families.
pub fn strict_abscissa_interval(a: Complex64, c: Complex64) -> (f64, f64) {
    (-a.re, (1.0 - c.re).min(0.0))
}

/// Mellin-Barnes integral on the line `Re z = gamma` separating the pole
/// families. Terminating parameters are summed exactly.
pub fn psi_mellin_barnes(
    a: Complex64,
    c: Complex64,
    x: &BranchedBase,
    gamma: f64,
    height: f64,
    step: f64,
) -> Result<PsiEvaluation> {
    check_argument(x)?;
    if let Some(d) = terminating_degree(a, c) {
        let e = exact_polynomial(a, c, x, d);
        return Ok(PsiEvaluation {
            route: Route::MellinBarnes,
            params: PsiParams::MellinBarnes {
                gamma,
                height: 0.0,
                step: 0.0,
                residues: d + 1,
            },
            ..e
        });
    }
    let (lo, hi) = strict_abscissa_interval(a, c);
    if lo >= hi {
        return Err(Error::AbscissaInfeasible { lo, hi });
    }
    if !(lo < gamma && gamma < hi) {
        return Err(Error::Validity(format!("abscissa {gamma} outside ({lo}, {hi})")));
    }
    mb_evaluate(a, c, x, gamma, height, step, false)
}

fn check_line(height: f64, step: f64) -> Result<()> {
    if !(height > 1.0 && step > 0.0 && step < height) {
        return Err(Error::InvalidInput(format!(
            "bad contour truncation: height {height}, step {step}"
        )));
    }
    Ok(())
}

/// Real parts of all kernel poles in `[lo, hi]`.
fn pole_abscissae(a: Complex64, c: Complex64, lo: f64, hi: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut push_family = |start: f64, dir: f64| {
        let mut p = start;
        while (dir > 0.0 && p <= hi) || (dir < 0.0 && p >= lo) {
            if p >= lo && p <= hi {
                out.push(p);
            }
            p += dir;
        }
    };
    push_family(-a.re, -1.0);
    push_family(0.0, 1.0);
    push_family(1.0 - c.re, 1.0);
    out
}

fn distance_to_poles(a: Complex64, c: Complex64, gamma: f64) -> f64 {
    pole_abscissae(a, c, gamma - 2.0, gamma + 2.0)
        .into_iter()
        .map(|p| (p - gamma).abs())
        .fold(2.0, f64::min)
}

/// Residues of the poles crossed by moving the separating contour to
/// `Re z = gamma`; `skip_left` leaves out the left family (used when those
/// terms are the asymptotic partial sum).
fn crossed_residues(
    a: Complex64,
    c: Complex64,
    x: &BranchedBase,
    gamma: f64,
    skip_left: bool,
) -> Result<(Complex64, usize)> {
    let mut sum = Complex64::zero();
    let mut count = 0;
    let b = a - c + 1.0;
    if !skip_left && -a.re > gamma {
        let n = (-a.re - gamma).floor() as usize + 1;
        sum += expansion_terms(a, c, x, 0, n).0;
        count += n;
    }
    let lx = x.ln();
    // z = j, Gamma(-z) poles
    if gamma > 0.0 {
        let inv_b = log_gamma(b).map(|l| -l)?;
        let mut poch = Complex64::new(1.0, 0.0);
        let mut fact = 0.0f64;
        for j in 0..=(gamma.floor() as usize) {
            let jf = j as f64;
            if j > 0 {
                poch *= a + (jf - 1.0);
                fact += jf.ln();
            }
            let g = 1.0 - c - jf;
            if is_gamma_pole(g) {
                return Err(Error::Singular(format!("double pole at z = {j} (c = {c})")));
            }
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sum += poch * sign * (log_gamma(g)? + inv_b - fact + jf * lx).exp();
            count += 1;
        }
    }
    // z = 1-c+j, Gamma(1-c-z) poles
    let start = 1.0 - c.re;
    if start < gamma {
        let inv_a = -log_gamma(a)?;
        let mut poch = Complex64::new(1.0, 0.0);
        let mut fact = 0.0f64;
        for j in 0..=((gamma - start).floor() as usize) {
            let jf = j as f64;
            if j > 0 {
                poch *= b + (jf - 1.0);
                fact += jf.ln();
            }
            let g = c - 1.0 - jf;
            if is_gamma_pole(g) {
                return Err(Error::Singular(format!("double pole at z = 1-c+{j} (c = {c})")));
            }
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sum += poch * sign * (log_gamma(g)? + inv_a - fact + (1.0 - c + jf) * lx).exp();
            count += 1;
        }
    }
    Ok((sum, count))
}

#[allow(clippy::too_many_arguments)]
fn mb_evaluate(
    a: Complex64,
    c: Complex64,
    x: &BranchedBase,
    gamma: f64,
    height: f64,
    step: f64,
    skip_left: bool,
) -> Result<PsiEvaluation> {
    check_line(height, step)?;
    let kernel = Kernel::new(a, c, x)?;
    let line = line_integral(|t| kernel.eval(Complex64::new(gamma, t)), height, step)?;
    let (res, residues) = crossed_residues(a, c, x, gamma, skip_left)?;
    let value = line.value + res;
    Ok(PsiEvaluation {
        value,
        route: Route::MellinBarnes,
        params: PsiParams::MellinBarnes {
            gamma,
            height,
            step,
            residues,
        },
        error_bound: (line.error + 8.0 * EPS * res.norm()).max(f64::MIN_POSITIVE),
        heuristic: true,
    })
}

/// Mellin-Barnes integral on an arbitrary line `Re z = gamma` (kept at least
/// `0.05` from every pole), corrected by the residues of crossed poles.
pub fn psi_mellin_barnes_shifted(
    a: Complex64,
    c: Complex64,
    x: &BranchedBase,
    gamma: f64,
    height: f64,
    step: f64,
) -> Result<PsiEvaluation> {
    check_argument(x)?;
    if let Some(d) = terminating_degree(a, c) {
        return Ok(exact_polynomial(a, c, x, d));
    }
    if distance_to_poles(a, c, gamma) < 0.05 {
        return Err(Error::Validity(format!("abscissa {gamma} too close to a pole")));
    }
    mb_evaluate(a, c, x, gamma, height, step, false)
}

/// Step fine enough for the pole distance `d` of the line.
fn step_for(d: f64) -> f64 {
    DEFAULT_STEP.min(d / 6.0)
}

/// Point of `(lo, hi)` farthest from the pole abscissae.
fn farthest_from_poles(a: Complex64, c: Complex64, lo: f64, hi: f64) -> f64 {
    let mut best = (0.5 * (lo + hi), -1.0);
    for i in 1..40 {
        let g = lo + (hi - lo) * i as f64 / 40.0;
        let d = distance_to_poles(a, c, g).min(g - lo).min(hi - g);
        if d > best.1 {
            best = (g, d);
        }
    }
    best.0
}

/// Abscissa used by [`psi`]: inside the separating interval when it is
/// nonempty, otherwise the widest gap between pole abscissae that crosses the
/// fewest right-family poles.
pub fn default_abscissa(a: Complex64, c: Complex64) -> f64 {
    let (lo, hi) = strict_abscissa_interval(a, c);
    if lo < hi {
        return lo + (0.5 * (hi - lo)).min(0.3);
    }
    let window_lo = lo.min(1.0 - c.re).min(0.0) - 1.5;
    let window_hi = lo.max(1.0 - c.re).max(0.0) + 0.5;
    let mut poles = pole_abscissae(a, c, window_lo, window_hi);
    poles.push(window_lo);
    poles.push(window_hi);
    poles.sort_by(|p, q| p.partial_cmp(q).unwrap_or(core::cmp::Ordering::Equal));
    let integer_c = is_gamma_pole(1.0 - c) || is_gamma_pole(c - 1.0);
    let mut best: Option<(f64, usize, f64)> = None;
    for w in poles.windows(2) {
        let gap = w[1] - w[0];
        if gap < 0.1 {
            continue;
        }
        let g = 0.5 * (w[0] + w[1]);
        let right_crossed = usize::from(g > 0.0) + usize::from(1.0 - c.re < g);
        if integer_c && right_crossed > 0 {
            continue;
        }
        let key = (right_crossed, gap);
        if best.is_none_or(|(_, r, bg)| key.0 < r || (key.0 == r && gap > bg)) {
            best = Some((g, right_crossed, gap));
        }
    }
    best.map_or(lo - 0.5, |(g, _, _)| g)
}

/// `rho_N(a, c; x) = Psi(a, c; x) - sum_{k<N} (-1)^k (a)_k (a-c+1)_k / k! x^{-a-k}`,
/// as the kernel's line integral at `Re z` between `-Re a - N` and
/// `-Re a - N + 1` plus any right-family residues left of it. Returns the
/// value and its error estimate.
pub fn psi_remainder(a: Complex64, c: Complex64, x: &BranchedBase, n: usize) -> Result<(Complex64, f64)> {
    check_argument(x)?;
    if let Some(d) = terminating_degree(a, c) {
        let (v, abs) = expansion_terms(a, c, x, n, d + 1);
        return Ok((v, 8.0 * EPS * abs));
    }
    let lo = -a.re - n as f64;
    let gamma = farthest_from_poles(a, c, lo, lo + 1.0);
    let d = distance_to_poles(a, c, gamma);
    let height = default_height(a, c, x.declared_arg) + n as f64;
    let e = mb_evaluate(a, c, x, gamma, height, step_for(d), true)?;
    Ok((e.value, e.error_bound))
}

fn mb_auto(a: Complex64, c: Complex64, x: &BranchedBase) -> Result<PsiEvaluation> {
    let gamma = default_abscissa(a, c);
    let d = distance_to_poles(a, c, gamma);
    let height = default_height(a, c, x.declared_arg);
    mb_evaluate(a, c, x, gamma, height, step_for(d), false)
}

/// Route selector. Terminating parameters are summed exactly. For
/// `|x| >= 4 pi` the expansion with the smallest bound is tried first; a
/// Mellin-Barnes evaluation follows when its bound is not already at
/// rounding level. If no line separates the pole families the parameters are
/// reflected and evaluated on a shifted line with residue corrections.
pub fn psi(a: Complex64, c: Complex64, x: &BranchedBase) -> Result<PsiEvaluation> {
    check_argument(x)?;
    if let Some(d) = terminating_degree(a, c) {
        return Ok(exact_polynomial(a, c, x, d));
    }
    let mut diagnostics: Vec<String> = Vec::new();
    let mut best: Option<PsiEvaluation> = None;
    let mut consider = |r: Result<PsiEvaluation>, name: &str, best: &mut Option<PsiEvaluation>| match r {
        Ok(e) => {
            if best.is_none_or(|b| e.error_bound < b.error_bound) {
                *best = Some(e);
            }
        }
        Err(err) => diagnostics.push(format!("{name}: {err}")),
    };
    if x.norm() >= ASYMPTOTIC_THRESHOLD {
        let r = best_expansion_length(a, c, x).and_then(|n| psi_asymptotic(a, c, x, n));
        consider(r, "asymptotic", &mut best);
        if let Some(b) = best {
            if b.error_bound <= 1e-13 * b.value.norm() {
                return Ok(b);
            }
        }
    }
    let (lo, hi) = strict_abscissa_interval(a, c);
    if lo < hi {
        consider(mb_auto(a, c, x), "mellin_barnes", &mut best);
    } else {
        let r = psi_reflect(a, c, x).and_then(|(a2, c2, pref)| {
            let e = mb_auto(a2, c2, x)?;
            Ok(PsiEvaluation {
                value: e.value * pref,
                route: Route::Reflected,
                error_bound: e.error_bound * pref.norm(),
                ..e
            })
        });
        consider(r, "reflected mellin_barnes", &mut best);
    }
    best.ok_or(Error::AllRoutesFailed(diagnostics))
}

/// One route with its default parameters; [`Route::Reflected`] evaluates the
/// contour integral at the reflected parameters.
pub fn psi_by_route(a: Complex64, c: Complex64, x: &BranchedBase, route: Route) -> Result<PsiEvaluation> {
    check_argument(x)?;
    match route {
        Route::Integral => {
            if (x.declared_arg - x.value.arg()).abs() > 1e-12 {
                return Err(Error::Validity("integral route needs the principal argument".into()));
            }
            psi_integral(a, c, x.value, default_phi(x.value), DEFAULT_NODES)
        }
        Route::MellinBarnes => {
            let (lo, hi) = strict_abscissa_interval(a, c);
            if lo < hi || terminating_degree(a, c).is_some() {
                mb_auto(a, c, x)
            } else {
                psi_by_route(a, c, x, Route::Reflected)
            }
        }
        Route::Asymptotic => psi_asymptotic(a, c, x, best_expansion_length(a, c, x)?),
        Route::Reflected => {
            let (a2, c2, pref) = psi_reflect(a, c, x)?;
            let e = mb_auto(a2, c2, x)?;
            Ok(PsiEvaluation {
                value: e.value * pref,
                route: Route::Reflected,
                error_bound: e.error_bound * pref.norm(),
                ..e
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::c;
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    fn two_pi_i(l: f64) -> BranchedBase {
        BranchedBase::imaginary(2.0 * PI * l)
    }

    // mpmath hyperu at 30 digits
    const U_4_35: Complex64 = Complex64::new(3.499_251_102_519_790_1e-4, 3.246_686_869_069_480_4e-4);
    const U_07_02: Complex64 = Complex64::new(0.155_989_811_279_358_4, 0.216_625_290_775_790_69);
    const U_M05_03: Complex64 = Complex64::new(1.801_738_984_526_557, 1.745_740_485_428_497_2);

    #[test]
    fn integral_examples() {
        let e = psi_integral(c(1.0, 0.0), c(2.0, 0.0), c(5.0, 0.0), 0.0, 64).unwrap();
        assert!(rel(e.value, c(0.2, 0.0)) < 1e-12);
        assert!(e.heuristic && e.error_bound > 0.0);
        let e = psi_integral(c(2.0, 0.0), c(3.0, 0.0), c(1.0, 0.0), 0.0, 64).unwrap();
        assert!(rel(e.value, c(1.0, 0.0)) < 1e-12);
        let x = two_pi_i(1.0);
        let e = psi_integral(c(4.0, 0.0), c(3.5, 0.0), x.value, -PI / 4.0, DEFAULT_NODES).unwrap();
        let m = psi_mellin_barnes(c(4.0, 0.0), c(3.5, 0.0), &x, -3.7, 40.0, 0.05).unwrap();
        assert!(rel(e.value, m.value) < 1e-8);
        assert!(rel(e.value, U_4_35) < 1e-10);
    }

    #[test]
    fn forced_routes() {
        let (a, b) = (c(4.0, 0.0), c(3.5, 0.0));
        let x = two_pi_i(1.0);
        for route in [Route::Integral, Route::MellinBarnes, Route::Reflected] {
            let e = psi_by_route(a, b, &x, route).unwrap();
            assert_eq!(e.route, route);
            assert!(rel(e.value, U_4_35) < 1e-10, "{route:?}");
        }
        let e = psi_by_route(a, b, &x, Route::Asymptotic).unwrap();
        assert!((e.value - U_4_35).norm() <= e.error_bound);
        let near = BranchedBase::imaginary(2.0 * PI * (1.0 - 2e-9));
        assert!(psi_by_route(a, b, &near, Route::Asymptotic).is_ok());
        assert!(psi_by_route(a, b, &BranchedBase::imaginary(2.0 * PI * 0.999), Route::Asymptotic).is_err());
        let wound = BranchedBase::with_arg(c(-5.0, 0.0), -PI).unwrap();
        assert!(matches!(psi_by_route(a, b, &wound, Route::Integral), Err(Error::Validity(_))));
    }

    #[test]
    fn integral_validity() {
        let r = psi_integral(c(-0.5, 0.0), c(1.0, 0.0), c(3.0, 0.0), 0.0, 64);
        assert!(matches!(r, Err(Error::Validity(_))));
        let r = psi_integral(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 3.0), 0.5, 64);
        assert!(matches!(r, Err(Error::Validity(_))));
        assert!(matches!(
            psi_integral(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), 0.0, 64),
            Err(Error::ZeroArgument)
        ));
    }

    #[test]
    fn mellin_barnes_examples() {
        let x = BranchedBase::principal(c(5.0, 0.0));
        let e = psi_mellin_barnes(c(1.0, 0.0), c(2.0, 0.0), &x, -0.5, 40.0, 0.05).unwrap();
        assert!((e.value - c(0.2, 0.0)).norm() < 1e-9);

        let x = two_pi_i(-1.0);
        let (a, cc) = (c(0.7, 0.0), c(0.2, 0.0));
        let m = psi_mellin_barnes(a, cc, &x, -0.3, 40.0, 0.05).unwrap();
        assert!(rel(m.value, U_07_02) < 1e-12);
        let s = psi_asymptotic(a, cc, &x, 25).unwrap();
        assert!((m.value - s.value).norm() <= m.error_bound + s.error_bound);
    }

    #[test]
    fn mellin_barnes_errors() {
        let x = two_pi_i(1.0);
        assert!(matches!(
            psi_mellin_barnes(c(-0.5, 0.0), c(0.3, 0.0), &x, -0.2, 40.0, 0.05),
            Err(Error::AbscissaInfeasible { .. })
        ));
        let far = BranchedBase::with_arg(c(0.0, -1.0), 1.5 * PI).unwrap();
        assert!(matches!(
            psi_mellin_barnes(c(1.5, 0.0), c(0.3, 0.0), &far, -0.5, 40.0, 0.05),
            Err(Error::Divergence { .. })
        ));
        assert!(matches!(
            psi_mellin_barnes(c(1.5, 0.0), c(0.3, 0.0), &x, 0.2, 40.0, 0.05),
            Err(Error::Validity(_))
        ));
    }

    #[test]
    fn branch_beyond_principal() {
        // arg x = 5 pi / 4 lies on a sheet the principal branch cannot reach
        let x = BranchedBase::with_arg(c(-3.0, -3.0), 1.25 * PI).unwrap();
        let (a, cc) = (c(1.3, 0.2), c(0.4, 0.0));
        let m = psi_mellin_barnes(a, cc, &x, -0.8, 60.0, 0.05).unwrap();
        let m2 = psi_mellin_barnes(a, cc, &x, -0.4, 80.0, 0.025).unwrap();
        assert!((m.value - m2.value).norm() <= m.error_bound + m2.error_bound + 1e-12);
        let p = psi(a, cc, &BranchedBase::principal(x.value)).unwrap();
        assert!(rel(m.value, p.value) > 1e-3);
    }

    #[test]
    fn asymptotic_examples() {
        let x = BranchedBase::principal(c(1e6, 0.0));
        let e = psi_asymptotic(c(1.0, 0.0), c(2.0, 0.0), &x, 1).unwrap();
        assert!(rel(e.value, c(1e-6, 0.0)) < 1e-15);
        assert!(e.error_bound <= 1e-12 * e.value.norm());

        let (sr, sr1) = (c(-0.5, 0.0), c(4.0, 0.0));
        let x = two_pi_i(3.0);
        let e = psi_asymptotic(sr1, sr + sr1, &x, 1).unwrap();
        let lead = Complex64::new(0.0, 6.0 * PI).powf(-4.0);
        assert!(rel(e.value, lead) < 1e-14);

        let x = two_pi_i(1.0);
        let s = psi_asymptotic(c(4.0, 0.0), c(3.5, 0.0), &x, 20).unwrap();
        let m = psi(c(4.0, 0.0), c(3.5, 0.0), &x).unwrap();
        assert!((s.value - m.value).norm() <= s.error_bound);
    }

    #[test]
    fn asymptotic_preconditions() {
        let x = two_pi_i(2.0);
        assert!(matches!(
            psi_asymptotic(c(-5.5, 0.0), c(0.5, 0.0), &x, 5),
            Err(Error::BoundInvalid(_))
        ));
        assert!(matches!(
            psi_asymptotic(c(1.0, 0.0), c(0.5, 0.0), &two_pi_i(0.5), 5),
            Err(Error::Validity(_))
        ));
    }

    #[test]
    fn reflection_examples() {
        let x = BranchedBase::principal(c(2.0, 3.0));
        let (a, cc, p) = psi_reflect(c(1.0, 0.0), c(2.0, 0.0), &x).unwrap();
        assert_eq!((a, cc), (c(0.0, 0.0), c(0.0, 0.0)));
        assert!(rel(p, x.value.inv()) < 1e-15);
        let e = psi(a, cc, &x).unwrap();
        assert_eq!(e.value, c(1.0, 0.0));

        let (sr, sr1) = (c(-0.5, 1.0), c(4.0, -2.0));
        let (a, cc, p) = psi_reflect(sr1, sr + sr1, &x).unwrap();
        assert!((a - (1.0 - sr)).norm() < 1e-15);
        assert!((cc - (2.0 - sr - sr1)).norm() < 1e-15);
        assert!(rel(p, principal_power(&x, 1.0 - sr - sr1).unwrap()) < 1e-15);

        let x = two_pi_i(1.0);
        let (a1, c1, p1) = psi_reflect(c(4.0, 0.0), c(3.5, 0.0), &x).unwrap();
        let (a2, c2, p2) = psi_reflect(a1, c1, &x).unwrap();
        assert!((a2 - 4.0).norm() < 1e-12 && (c2 - 3.5).norm() < 1e-12);
        assert!((p1 * p2 - 1.0).norm() < 1e-12);
        assert!(matches!(
            psi_reflect(c(1.0, 0.0), c(1.0, 0.0), &BranchedBase::principal(c(0.0, 0.0))),
            Err(Error::ZeroArgument)
        ));
    }

    #[test]
    fn selector_examples() {
        let x = BranchedBase::principal(c(5.0, 0.0));
        assert!(rel(psi(c(1.0, 0.0), c(2.0, 0.0), &x).unwrap().value, c(0.2, 0.0)) < 1e-14);

        let x = two_pi_i(100.0);
        let e = psi(c(4.0, 0.0), c(3.5, 0.0), &x).unwrap();
        assert_eq!(e.route, Route::Asymptotic);
        let PsiParams::Asymptotic { terms } = e.params else {
            panic!("{:?}", e.params)
        };
        let more = psi_asymptotic(c(4.0, 0.0), c(3.5, 0.0), &x, terms + 5).unwrap();
        assert!((e.value - more.value).norm() <= e.error_bound);

        let x = two_pi_i(1.0);
        let (a, cc) = (c(-0.5, 0.0), c(0.3, 0.0));
        let e = psi(a, cc, &x).unwrap();
        assert_eq!(e.route, Route::Reflected);
        let (a2, c2, pref) = psi_reflect(a, cc, &x).unwrap();
        let inner = psi_mellin_barnes_shifted(a2, c2, &x, -1.0, 40.0, 0.02).unwrap();
        assert!(rel(e.value, pref * inner.value) < 1e-12);
        assert!(rel(e.value, U_M05_03) < 1e-12);
        let direct = psi_mellin_barnes_shifted(a, cc, &x, 0.25, 40.0, 0.01).unwrap();
        assert!(rel(e.value, direct.value) < 1e-12);
    }

    #[test]
    fn selector_rejects_bad_arguments() {
        let zero = BranchedBase::principal(c(0.0, 0.0));
        assert!(matches!(psi(c(1.0, 0.0), c(0.5, 0.0), &zero), Err(Error::ZeroArgument)));
        let far = BranchedBase::with_arg(c(-1.0, 0.0), -1.5 * PI + 0.01).unwrap_or(BranchedBase {
            value: c(0.0, 1.0),
            declared_arg: -1.5 * PI,
        });
        assert!(matches!(psi(c(1.0, 0.0), c(0.5, 0.0), &far), Err(Error::Divergence { .. })));
    }

    #[test]
    fn complex_parameters_match_reference() {
        let x = BranchedBase::principal(c(3.0, -7.0));
        let e = psi(c(1.5, 2.0), c(-0.5, 1.0), &x).unwrap();
        let reference = c(-0.007_278_860_738_987_601, -0.000_103_087_925_168_693_96);
        assert!(rel(e.value, reference) < 1e-11, "{e:?}");
    }

    #[test]
    fn remainder_matches_difference() {
        let (a, cc) = (c(0.7, 0.3), c(0.2, -0.4));
        let x = BranchedBase::imaginary(20.0);
        for n in [1usize, 4, 10] {
            let (rho, err) = psi_remainder(a, cc, &x, n).unwrap();
            let full = psi(a, cc, &x).unwrap();
            let partial = expansion_terms(a, cc, &x, 0, n).0;
            assert!(
                (rho - (full.value - partial)).norm() <= err + full.error_bound + 1e-15,
                "N = {n}"
            );
            assert!(rho.norm() <= asymptotic_bound(a, cc, &x, n).unwrap());
        }
        // poles of Gamma(1-c-z) to the left of the line need their residues
        let (a, cc) = (c(1.2, 0.0), c(7.4, 0.0));
        let (rho, err) = psi_remainder(a, cc, &x, 2).unwrap();
        let full = psi(a, cc, &x).unwrap();
        let partial = expansion_terms(a, cc, &x, 0, 2).0;
        assert!((rho - (full.value - partial)).norm() <= 10.0 * (err + full.error_bound));
    }

    fn random_x(rng: &mut StdRng, lo: f64, hi: f64, i: usize) -> BranchedBase {
        let r = rng.gen_range(lo..hi);
        let th = match i % 4 {
            0 => PI / 2.0,
            1 => -PI / 2.0,
            _ => rng.gen_range(-PI / 2.0..PI / 2.0),
        };
        if th.abs() == PI / 2.0 {
            BranchedBase::imaginary(r * th.signum())
        } else {
            BranchedBase::principal(Complex64::from_polar(r, th))
        }
    }

    #[test]
    fn closed_form_family_all_routes() {
        let mut rng = StdRng::seed_from_u64(11);
        for i in 0..50 {
            let a = c(rng.gen_range(0.05..5.0), rng.gen_range(-2.0..2.0));
            let x = random_x(&mut rng, 1.0, 100.0, i);
            let exact = principal_power(&x, -a).unwrap();
            let e = psi(a, a + 1.0, &x).unwrap();
            assert!(rel(e.value, exact) < 1e-9, "psi a = {a}, x = {:?}", x);
            let e = psi_integral(a, a + 1.0, x.value, default_phi(x.value), DEFAULT_NODES).unwrap();
            assert!(rel(e.value, exact) < 1e-9, "integral a = {a}, x = {:?}", x);
            if x.norm() >= ASYMPTOTIC_MIN_MODULUS {
                let n = best_expansion_length(a, a + 1.0, &x).unwrap();
                let e = psi_asymptotic(a, a + 1.0, &x, n).unwrap();
                assert!(rel(e.value, exact) < 1e-9);
            }
        }
    }

    #[test]
    fn route_agreement_sample() {
        let mut rng = StdRng::seed_from_u64(5);
        for i in 0..30 {
            let a = c(rng.gen_range(0.2..4.0), rng.gen_range(-3.0..3.0));
            let cc = c(rng.gen_range(-2.0..a.re + 0.8), rng.gen_range(-3.0..3.0));
            let x = random_x(&mut rng, 2.0 * PI, 40.0 * PI, i);
            let n = best_expansion_length(a, cc, &x).unwrap();
            let s = psi_asymptotic(a, cc, &x, n).unwrap();
            let m = psi_mellin_barnes(
                a,
                cc,
                &x,
                default_abscissa(a, cc),
                default_height(a, cc, x.declared_arg),
                0.02,
            )
            .unwrap();
            let q = psi_integral(a, cc, x.value, default_phi(x.value), DEFAULT_NODES).unwrap();
            assert!((s.value - m.value).norm() <= s.error_bound + m.error_bound);
            assert!((q.value - m.value).norm() <= q.error_bound + m.error_bound);
            assert!((s.value - q.value).norm() <= s.error_bound + q.error_bound);
        }
    }

    #[test]
    fn reflection_identity_sample() {
        let mut rng = StdRng::seed_from_u64(3);
        for i in 0..20 {
            let a = c(rng.gen_range(0.3..3.0), rng.gen_range(-2.0..2.0));
            let cc = c(rng.gen_range(-1.5..a.re + 0.7), rng.gen_range(-2.0..2.0));
            let x = random_x(&mut rng, 2.0, 60.0, i);
            let (a2, c2, p) = psi_reflect(a, cc, &x).unwrap();
            let lhs = psi_integral(a, cc, x.value, default_phi(x.value), DEFAULT_NODES).unwrap();
            let rhs = psi_integral(a2, c2, x.value, default_phi(x.value), DEFAULT_NODES).unwrap();
            assert!(rel(p * rhs.value, lhs.value) < 1e-8, "a = {a}, c = {cc}");
        }
    }

    #[test]
    fn refinement_stays_within_estimates() {
        let (a, cc) = (c(1.3, 0.7), c(0.4, -0.5));
        let x = two_pi_i(1.5);
        let g = default_abscissa(a, cc);
        let rich = psi_mellin_barnes(a, cc, &x, g, 160.0, 0.00625).unwrap();
        let mut prev: Option<f64> = None;
        for (t, h) in [(20.0, 0.1), (40.0, 0.05), (80.0, 0.025)] {
            let e = psi_mellin_barnes(a, cc, &x, g, t, h).unwrap();
            let dev = (e.value - rich.value).norm();
            assert!(dev <= e.error_bound + rich.error_bound, "T = {t}");
            if let Some(p) = prev {
                assert!(dev <= p + e.error_bound);
            }
            prev = Some(dev);
        }
        let rich = psi_integral(a, cc, x.value, default_phi(x.value), 2048).unwrap();
        for nodes in [32usize, 64, 128] {
            let e = psi_integral(a, cc, x.value, default_phi(x.value), nodes).unwrap();
            assert!((e.value - rich.value).norm() <= e.error_bound + rich.error_bound);
        }
    }
}
