//! The series
//! `F_x^+-(s) = sum_{l_1..l_{r-1}} conv(l) / (l_1^{s_1}...l_{r-1}^{s_{r-1}})
//!  Psi(s_{r+1}, s_r+s_{r+1}; +-2 pi i (l_1+...+l_{r-1})/x)`
//! with `conv(l) = sum_{n | gcd(l)} n^{s_1+...+s_{r+1}-1} a_1(l_1/n)...a_{r-1}(l_{r-1}/n) a_r(n)`.
//!
//! Grouping by `L = l_1 + ... + l_{r-1}` gives `sum_L D(L) Psi(a, c; X L)`
//! with `a = s_{r+1}`, `c = s_r + s_{r+1}` and `X = +-2 pi i / x`. Writing
//! `Psi = sum_{k<N} c_k (XL)^{-a-k} + rho_N` and summing the Dirichlet
//! series `sum_L D(L) L^{-a-k} = L_r(1-s_r+k) L_MT,r-1(s_1,...,s_{r-1}, s_{r+1}+k)`
//! in closed form leaves a remainder series in `rho_N` that converges like
//! `L^{-Re a - N}`.
//!
//! [`f_series`] sums `Psi` directly up to a cap and closes the tail with the
//! expansion; [`f_series_continued`] uses the expansion for every `L` and
//! sums the `rho_N` series, which continues `F` to wherever it converges.

use alloc::{format, vec::Vec};
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::{Float, Zero};

use super::coeffs::CoefficientSequence;
use super::conv::ConvolutionTable;
use super::direct::{check_inputs, SeriesTruncation};
use super::mb::mt_eval;
use super::region::{in_convergence_region, MtPoint};
use crate::complex::{pochhammer, principal_power, real_pow, BranchedBase};
use crate::error::{Error, Result};
use crate::psi::{asymptotic_bound, psi, psi_remainder};

const EPS: f64 = f64::EPSILON;
const CAP_START: usize = 16;

fn cap_limit(r: usize) -> usize {
    match r {
        2 => 8192,
        3 => 4096,
        _ => 160,
    }
}

struct FSetup<'a> {
    p: &'a MtPoint,
    coeffs: &'a [CoefficientSequence],
    /// `s_{r+1}`.
    a: Complex64,
    /// `s_r + s_{r+1}`.
    c: Complex64,
    /// `+-2 pi i / x`.
    base: BranchedBase,
    /// `|D(L)| <= k_d L^growth`.
    growth: f64,
    k_d: f64,
}

impl<'a> FSetup<'a> {
    fn new(x: f64, p: &'a MtPoint, coeffs: &'a [CoefficientSequence], sign: i32) -> Result<Self> {
        check_inputs(p, coeffs, 1.0)?;
        if p.depth() < 2 {
            return Err(Error::InvalidInput("F needs depth at least two".into()));
        }
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::InvalidInput(format!("x = {x} must be a positive real")));
        }
        if sign != 1 && sign != -1 {
            return Err(Error::InvalidInput(format!("sign {sign} must be +1 or -1")));
        }
        let r = p.depth();
        let b = p.total() - 1.0;
        let e: Vec<f64> = (0..r - 1).map(|j| p.s()[j].re - coeffs[j].alpha()).collect();
        let beta = b.re + coeffs[r - 1].alpha() - (0..r - 1).map(|j| coeffs[j].alpha()).sum::<f64>();
        let pos: f64 = e.iter().filter(|&&v| v > 0.0).sum();
        let neg: f64 = e.iter().filter(|&&v| v < 0.0).map(|v| -v).sum();
        let growth = if beta >= 0.0 { (beta - pos).max(0.0) } else { 0.0 } + neg + (r - 2) as f64 + 0.5;
        let k_d = 2.0 * coeffs.iter().map(|a| a.bound_constant()).product::<f64>();
        Ok(Self {
            p,
            coeffs,
            a: p.top(),
            c: p.last() + p.top(),
            base: BranchedBase::imaginary(sign as f64 * 2.0 * PI / x),
            growth,
            k_d,
        })
    }

    fn r(&self) -> usize {
        self.p.depth()
    }

    fn table(&self, cap: usize) -> Result<ConvolutionTable> {
        let r = self.r();
        ConvolutionTable::build(
            &self.coeffs[..r - 1],
            &self.coeffs[r - 1],
            &self.p.s()[..r - 1],
            self.p.total() - 1.0,
            cap,
        )
    }

    /// `(-1)^k (a)_k (a-c+1)_k / k!`.
    fn coef(&self, k: usize) -> Complex64 {
        let mut w = pochhammer(self.a, k) * pochhammer(self.a - self.c + 1.0, k);
        for j in 1..=k {
            w /= j as f64;
        }
        if k % 2 == 1 {
            -w
        } else {
            w
        }
    }

    /// `L_r(1-s_r+k) L_MT,r-1(s_1,...,s_{r-1}, s_{r+1}+k)` and its error.
    fn full(&self, k: usize, tol: f64) -> Result<(Complex64, f64)> {
        let r = self.r();
        let lr = self.coeffs[r - 1].l_eval(1.0 - self.p.last() + k as f64)?;
        let w = self.a + k as f64;
        let (inner, err) = if r == 2 {
            let v = self.coeffs[0].l_eval(self.p.get(1) + w)?;
            (v, 1e-14 * v.norm())
        } else {
            let v = mt_eval(&self.p.inner(w), &self.coeffs[..r - 1], tol)?;
            (v.value, v.error)
        };
        Ok((lr * inner, lr.norm() * err + 4.0 * EPS * (lr * inner).norm()))
    }

    /// Bound on `sum_{L > cap} |D(L)| |rho_N(XL)|`, or infinity when the
    /// series does not converge.
    fn remainder_tail(&self, n: usize, cap: usize) -> f64 {
        let excess = self.a.re + n as f64 - self.growth - 1.0;
        if !(excess > 0.0) {
            return f64::INFINITY;
        }
        match asymptotic_bound(self.a, self.c, &self.base, n) {
            Ok(b0) => self.k_d * b0 * (cap as f64).powf(-excess) / excess,
            Err(_) => f64::INFINITY,
        }
    }

    /// `|c_k X^{-a-k}|` with the branch factor.
    fn amplification(&self, k: usize) -> f64 {
        let x = self.base.norm();
        self.coef(k).norm() * x.powf(-self.a.re - k as f64) * (self.a.im.abs() * PI / 2.0).exp()
    }

    fn power(&self, k: usize) -> Result<Complex64> {
        principal_power(&self.base, -(self.a + k as f64))
    }

    fn truncation(&self, cap: usize, tail: f64) -> SeriesTruncation {
        let mut terms = 0u64;
        let k = self.r() - 1;
        for total in k..=cap {
            terms += binomial(total - 1, k - 1);
        }
        SeriesTruncation {
            caps: alloc::vec![cap],
            tail_bound: tail,
            terms_used: terms,
        }
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    let mut v = 1u64;
    for j in 0..k {
        v = v * (n - j) as u64 / (j + 1) as u64;
    }
    v
}

fn inner_tol(tol: f64) -> f64 {
    (tol * 1e-4).clamp(1e-13, 1e-9)
}

/// Absolute-convergence test for the `Psi`-weighted series: the closed-form
/// Dirichlet series at `k = 0` must converge absolutely.
fn check_f_region(setup: &FSetup) -> Result<()> {
    let (p, r) = (setup.p, setup.r());
    let alpha_r = setup.coeffs[r - 1].alpha();
    let slack_r = -alpha_r - p.last().re;
    let alphas: Vec<f64> = setup.coeffs[..r - 1].iter().map(|a| a.alpha()).collect();
    let inner = in_convergence_region(&p.inner(p.top()), &alphas)?;
    if slack_r <= 0.0 && slack_r <= inner.slack {
        return Err(Error::Region {
            witness: alloc::vec![r],
            slack: slack_r,
        });
    }
    if !inner.inside {
        return Err(Error::Region {
            witness: inner.witness,
            slack: inner.slack,
        });
    }
    Ok(())
}

/// `F_x^+-` by direct `Psi` summation over `l_1 + ... + l_{r-1} <= L` with
/// the remaining tail summed through the asymptotic expansion of `Psi`.
pub fn f_series(
    x: f64,
    p: &MtPoint,
    coeffs: &[CoefficientSequence],
    sign: i32,
    tol: f64,
) -> Result<(Complex64, SeriesTruncation)> {
    let setup = FSetup::new(x, p, coeffs, sign)?;
    check_inputs(p, coeffs, tol)?;
    check_f_region(&setup)?;
    let itol = inner_tol(tol);
    let mut cap = CAP_START;
    let limit = cap_limit(setup.r());
    loop {
        let table = setup.table(cap)?;
        let plan = plan_expansion(&setup, &table, cap, itol, tol);
        if let Some((n, bound)) = plan {
            return f_series_at(&setup, &table, cap, n, bound, itol, tol);
        }
        if cap >= limit {
            return Err(Error::Nonconvergence {
                what: "F series",
                detail: format!("tail bound above {tol} at cap {cap}"),
            });
        }
        cap *= 2;
    }
}

/// Expansion length minimising tail plus rounding at this cap, when the sum
/// fits in `tol / 2`. For depth three and more the inner evaluations carry
/// an error of about `itol` that the coefficients amplify.
fn plan_expansion(setup: &FSetup, table: &ConvolutionTable, cap: usize, itol: f64, tol: f64) -> Option<(usize, f64)> {
    let s0: f64 = (1..=cap).map(|l| table.abs_value(l) * (l as f64).powf(-setup.a.re)).sum();
    let inner = if setup.r() > 2 { 2.0 * itol } else { 0.0 };
    let mut best: Option<(usize, f64)> = None;
    let mut rounding = 0.0;
    for n in 1..=60usize {
        rounding += setup.amplification(n - 1) * (8.0 * EPS * s0.max(1.0) + inner);
        let total = setup.remainder_tail(n, cap) + rounding;
        if best.is_none_or(|(_, b)| total < b) {
            best = Some((n, total));
        }
    }
    best.filter(|&(_, b)| b <= tol / 2.0)
}

fn f_series_at(
    setup: &FSetup,
    table: &ConvolutionTable,
    cap: usize,
    n: usize,
    plan_bound: f64,
    itol: f64,
    tol: f64,
) -> Result<(Complex64, SeriesTruncation)> {
    let mut value = Complex64::zero();
    let mut error = plan_bound;
    for l in 1..=cap {
        let d = table.value(l);
        if d.is_zero() {
            continue;
        }
        let e = psi(setup.a, setup.c, &setup.base.scale(l as f64))?;
        value += d * e.value;
        error += table.abs_value(l) * e.error_bound;
    }
    for k in 0..n {
        let (full, full_err) = setup.full(k, itol)?;
        let w = -(setup.a + k as f64);
        let head: Complex64 = (1..=cap).map(|l| table.value(l) * real_pow(l as f64, w)).sum();
        let coef = setup.coef(k) * setup.power(k)?;
        value += coef * (full - head);
        error += coef.norm() * full_err;
    }
    if error > tol {
        return Err(Error::Nonconvergence {
            what: "F series",
            detail: format!("error bound {error} above {tol}"),
        });
    }
    Ok((value, setup.truncation(cap, error)))
}

/// Paper-faithful continuation: the expansion for every `L` plus the series
/// `(X)^{1-s_r-s_{r+1}} sum_L D(L) L^{1-s_r-s_{r+1}} rho_N(1-s_r, 2-s_r-s_{r+1}; XL)`.
pub fn f_series_continued(
    x: f64,
    p: &MtPoint,
    coeffs: &[CoefficientSequence],
    sign: i32,
    n: usize,
    tol: f64,
) -> Result<(Complex64, SeriesTruncation)> {
    let setup = FSetup::new(x, p, coeffs, sign)?;
    check_inputs(p, coeffs, tol)?;
    let r = setup.r();
    let alpha_r = coeffs[r - 1].alpha();
    if !(p.last().re < n as f64 - alpha_r) {
        return Err(Error::NTooSmall {
            n,
            detail: format!("need Re s_r < N - alpha_r, Re s_r = {}", p.last().re),
        });
    }
    let alphas: Vec<f64> = coeffs[..r - 1].iter().map(|a| a.alpha()).collect();
    let shifted = in_convergence_region(&p.inner(p.top() + n as f64), &alphas)?;
    if !shifted.inside {
        return Err(Error::NTooSmall {
            n,
            detail: format!("subset {:?} fails after the shift by N", shifted.witness),
        });
    }
    if setup.remainder_tail(n, 1).is_infinite() {
        return Err(Error::NTooSmall {
            n,
            detail: format!(
                "remainder series weight L^({:.3} - N) does not decay fast enough",
                setup.growth - setup.a.re
            ),
        });
    }
    let itol = inner_tol(tol);
    let mut value = Complex64::zero();
    let mut error = 0.0;
    for k in 0..n {
        let (full, full_err) = setup.full(k, itol)?;
        let coef = setup.coef(k) * setup.power(k)?;
        value += coef * full;
        error += coef.norm() * full_err + 8.0 * EPS * (coef * full).norm();
    }
    let limit = cap_limit(r);
    let mut cap = 1usize;
    while setup.remainder_tail(n, cap) > tol / 4.0 {
        cap *= 2;
        if cap > limit {
            return Err(Error::Nonconvergence {
                what: "remainder series",
                detail: format!("tail above {tol} at cap {limit}"),
            });
        }
    }
    let tail = setup.remainder_tail(n, cap);
    let table = setup.table(cap)?;
    let ar = 1.0 - p.last();
    let cr = 2.0 - p.last() - p.top();
    let shift = p.last() + p.top() - 1.0;
    let prefactor = principal_power(&setup.base, -shift)?;
    let mut rest = Complex64::zero();
    let mut rest_err = 0.0;
    for l in 1..=cap {
        let d = table.value(l);
        if d.is_zero() {
            continue;
        }
        let (rho, rho_err) = psi_remainder(ar, cr, &setup.base.scale(l as f64), n)?;
        let w = real_pow(l as f64, -shift);
        rest += d * w * rho;
        rest_err += table.abs_value(l) * w.norm() * rho_err;
    }
    value += prefactor * rest;
    error += prefactor.norm() * rest_err + tail;
    if error > tol {
        return Err(Error::Nonconvergence {
            what: "continued F series",
            detail: format!("error bound {error} above {tol}"),
        });
    }
    Ok((value, setup.truncation(cap, error)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::real;
    use alloc::vec;

    fn ones(r: usize) -> Vec<CoefficientSequence> {
        vec![CoefficientSequence::ones(); r]
    }

    #[test]
    fn dual_routes_agree() {
        let p = MtPoint::real(&[3.0, -0.5, 4.0]).unwrap();
        let (f, t) = f_series(1.0, &p, &ones(2), 1, 1e-9).unwrap();
        let (g, u) = f_series_continued(1.0, &p, &ones(2), 1, 10, 1e-9).unwrap();
        assert!(t.tail_bound <= 1e-9 && u.tail_bound <= 1e-9);
        assert!((f - g).norm() <= t.tail_bound + u.tail_bound, "{f} vs {g}");
    }

    #[test]
    fn conjugation_symmetry() {
        let p = MtPoint::real(&[3.0, -0.5, 4.0]).unwrap();
        let (fp, _) = f_series(1.0, &p, &ones(2), 1, 1e-10).unwrap();
        let (fm, _) = f_series(1.0, &p, &ones(2), -1, 1e-10).unwrap();
        assert!((fp - fm.conj()).norm() < 1e-10 * fp.norm().max(1.0));
        let chi = CoefficientSequence::character(4, 1).unwrap();
        let coeffs = vec![chi.clone(), chi.conj()];
        let p = MtPoint::real(&[2.0, -0.5, 3.0]).unwrap();
        let (gp, _) = f_series_continued(1.0, &p, &coeffs, 1, 10, 1e-9).unwrap();
        let (gm, _) = f_series_continued(1.0, &p, &coeffs, -1, 10, 1e-9).unwrap();
        assert!(gp.norm().is_finite());
        assert!((gp - gm.conj()).norm() < 1e-10 * gp.norm().max(1.0));
    }

    #[test]
    fn continuation_stable_in_n() {
        let p = MtPoint::real(&[3.0, 0.5, 0.2]).unwrap();
        assert!(matches!(f_series(1.0, &p, &ones(2), 1, 1e-8), Err(Error::Region { .. })));
        let vals: Vec<Complex64> = [15usize, 20, 25]
            .iter()
            .map(|&n| f_series_continued(1.0, &p, &ones(2), 1, n, 1e-8).unwrap().0)
            .collect();
        assert!((vals[0] - vals[1]).norm() < 1e-7, "{vals:?}");
        assert!((vals[0] - vals[2]).norm() < 1e-7, "{vals:?}");
    }

    #[test]
    fn small_n_rejected() {
        let p = MtPoint::real(&[3.0, 2.5, 0.2]).unwrap();
        assert!(matches!(
            f_series_continued(1.0, &p, &ones(2), 1, 2, 1e-8),
            Err(Error::NTooSmall { .. })
        ));
    }

    #[test]
    fn term_by_term_oracle() {
        // the defining sum with cap 4000 and the leading-term tail estimate
        let p = MtPoint::real(&[3.0, -0.5, 4.0]).unwrap();
        let (f, _) = f_series(1.0, &p, &ones(2), 1, 1e-10).unwrap();
        let mut head = Complex64::zero();
        let cap = 400u64;
        for l in 1..=cap {
            let conv: f64 = crate::arith::divisors(l).iter().map(|&n| (n as f64).powf(5.5)).sum();
            let base = BranchedBase::imaginary(2.0 * PI * l as f64);
            head += psi(real(4.0), real(3.5), &base).unwrap().value * conv / (l as f64).powi(3);
        }
        // sigma(l) ~ zeta(5.5) l^5.5, Psi ~ (2 pi i l)^{-4}
        let tail_scale = 1.03 * (2.0 * PI).powi(-4) * 2.0 * (cap as f64).powf(-0.5);
        let ratio = (f - head).norm() / tail_scale;
        assert!((ratio - 1.0).abs() < 0.1, "{f} vs {head}: ratio {ratio}");
    }

    #[test]
    fn depth_three_refinement() {
        let p = MtPoint::real(&[3.0, 3.0, -0.5, 4.0]).unwrap();
        let (f, t) = f_series(1.0, &p, &ones(3), 1, 1e-8).unwrap();
        let (g, u) = f_series_continued(1.0, &p, &ones(3), 1, 12, 1e-8).unwrap();
        assert!((f - g).norm() <= t.tail_bound + u.tail_bound, "{f} vs {g}");
    }
}
