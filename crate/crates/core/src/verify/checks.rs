//! Residual checkers. Each evaluates both sides of a functional equation by
//! separate routes and wraps the comparison in an [`FEReport`].

use alloc::{format, string::String, vec, vec::Vec};
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::{Float, Zero};

use super::locus::{singular_locus, SingularLocusSpec, DEFAULT_BAND};
use super::report::{FEReport, TruncationRecord};
use crate::complex::{exp_i_half_pi, gamma, principal_power, real, real_pow, rgamma, BranchedBase};
use crate::error::{Error, Result};
use crate::mt::{
    big_g_modified, f_series, f_series_continued, g_modified, in_convergence_region,
    modified_gamma_factor, mt_direct, mt_eval, CoefficientSequence, MtPoint, SeriesTruncation,
};
use crate::zeta_l::{gauss_sum, DirichletCharacter};

/// Expansion length used when the F series has to be continued.
pub const CONTINUATION_N: usize = 20;

/// Tolerance handed to each sub-evaluation.
fn sub_tol(tol: f64) -> f64 {
    (tol * 1e-3).max(1e-13)
}

/// Runs `f` at the default sub-tolerance, then tenfold tighter while the
/// combined error bound is not small against the size of both sides. The
/// last run that succeeded is kept.
fn refine(tol: f64, f: impl Fn(f64) -> Result<FEReport>) -> Result<FEReport> {
    let st = sub_tol(tol);
    let mut best = f(st)?;
    let scale = best.lhs.norm().max(best.rhs.norm());
    let floor = (st * scale).max(1e-13);
    let mut cur = st;
    while best.error_bound > 0.1 * tol * scale && scale < 1.0 && cur > floor {
        cur = (cur * 0.1).max(floor);
        match f(cur) {
            Ok(rep) => best = rep,
            Err(_) => break,
        }
    }
    Ok(best)
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "tolerance must be positive, got {tol}"
        )))
    }
}

fn labels(coeffs: &[CoefficientSequence]) -> Vec<String> {
    coeffs.iter().map(|a| a.label().into()).collect()
}

fn require_depth(p: &MtPoint, coeffs: &[CoefficientSequence]) -> Result<usize> {
    let r = p.depth();
    if r < 2 || coeffs.len() != r {
        return Err(Error::InvalidInput(format!(
            "need depth >= 2 with one sequence per slot, got depth {r} and {} sequences",
            coeffs.len()
        )));
    }
    Ok(r)
}

fn require_last_ones(coeffs: &[CoefficientSequence]) -> Result<()> {
    let last = &coeffs[coeffs.len() - 1];
    if last.is_ones() {
        Ok(())
    } else {
        Err(Error::Hypothesis(format!(
            "last sequence must be ones, got {}",
            last.label()
        )))
    }
}

/// Refuses points within the default band of a possible pole hyperplane.
pub fn guard_singular(p: &MtPoint, coeffs: &[CoefficientSequence]) -> Result<()> {
    let spec = SingularLocusSpec::from_coeffs(coeffs, DEFAULT_BAND)?;
    match singular_locus(&spec, p) {
        Some(w) => Err(Error::Singular(format!("{w}"))),
        None => Ok(()),
    }
}

/// Expansion lengths tried, in order, when the F series has to be continued.
const CONTINUATION_LENGTHS: [usize; 8] = [CONTINUATION_N, 15, 12, 10, 25, 30, 8, 6];

/// `F_x^+-` where the defining series converges, its continuation otherwise.
fn f_value(
    x: f64,
    p: &MtPoint,
    coeffs: &[CoefficientSequence],
    sign: i32,
    tol: f64,
) -> Result<(Complex64, SeriesTruncation, String)> {
    match f_series(x, p, coeffs, sign, tol) {
        Ok((v, t)) => Ok((v, t, "psi-sum".into())),
        Err(Error::Region { .. }) => {
            let mut first = None;
            for n in CONTINUATION_LENGTHS {
                match f_series_continued(x, p, coeffs, sign, n, tol) {
                    Ok((v, t)) => return Ok((v, t, format!("continued-n{n}"))),
                    Err(e @ (Error::NTooSmall { .. } | Error::Nonconvergence { .. })) => {
                        first.get_or_insert(e);
                    }
                    Err(e) => return Err(e),
                }
            }
            Err(first.expect("at least one length tried"))
        }
        Err(e) => Err(e),
    }
}

/// `e^{i pi w/2} F_x^+ + e^{-i pi w/2} F_x^-` with truncation records.
fn f_pair(
    x: f64,
    p: &MtPoint,
    coeffs: &[CoefficientSequence],
    w: Complex64,
    tol: f64,
    params: &mut Vec<TruncationRecord>,
) -> Result<Complex64> {
    let (fp, tp, rp) = f_value(x, p, coeffs, 1, tol)?;
    let (fm, tm, rm) = f_value(x, p, coeffs, -1, tol)?;
    params.push(TruncationRecord::from_series("F+", &rp, &tp));
    params.push(TruncationRecord::from_series("F-", &rm, &tm));
    Ok(exp_i_half_pi(w) * fp + exp_i_half_pi(-w) * fm)
}

/// `s_r + s_{r+1} - 1`.
fn shifted_sum(p: &MtPoint) -> Complex64 {
    p.last() + p.top() - 1.0
}

/// `(2 pi)^{w} Gamma(1 - s_r) {e^{i pi w/2} F_1^+ + e^{-i pi w/2} F_1^-}`, `w = s_r + s_{r+1} - 1`.
fn untwisted_side(
    p: &MtPoint,
    coeffs: &[CoefficientSequence],
    tol: f64,
    params: &mut Vec<TruncationRecord>,
) -> Result<Complex64> {
    let w = shifted_sum(p);
    let g = gamma(real(1.0) - p.last()).map_err(|_| {
        Error::Singular(format!("Gamma pole at 1 - s_r = {}", real(1.0) - p.last()))
    })?;
    let scale = real_pow(2.0 * PI, w) * g;
    let pair = f_pair(1.0, p, coeffs, w, tol / scale.norm().max(1.0), params)?;
    Ok(scale * pair)
}

/// Gamma-weighted depth `r - 1` term of the modified function.
fn correction_term(
    p: &MtPoint,
    coeffs: &[CoefficientSequence],
    tol: f64,
    params: &mut Vec<TruncationRecord>,
) -> Result<Complex64> {
    let factor = modified_gamma_factor(p)?;
    if factor.is_zero() {
        return Ok(factor);
    }
    let r = p.depth();
    let inner = p.inner(shifted_sum(p));
    let v = mt_eval(&inner, &coeffs[..r - 1], tol / factor.norm().max(1.0))?;
    params.push(TruncationRecord::from_value("inner", &v));
    Ok(factor * v.value)
}

/// `L_MT,r` with last sequence one, summed directly, against the Gamma term
/// plus the `F_1^+-` pair. Needs the point in the absolute-convergence region
/// with `Re s_r < alpha_r` and `Re s_{r+1} > 0`.
pub fn check_lemma_34_1(p: &MtPoint, coeffs: &[CoefficientSequence], tol: f64) -> Result<FEReport> {
    check_tol(tol)?;
    let r = require_depth(p, coeffs)?;
    require_last_ones(coeffs)?;
    let alphas: Vec<f64> = coeffs.iter().map(|a| a.alpha()).collect();
    let region = in_convergence_region(p, &alphas)?;
    if !region.inside {
        return Err(Error::Hypothesis(format!(
            "outside the convergence region: subset {:?} has slack {}",
            region.witness, region.slack
        )));
    }
    if !(p.last().re < alphas[r - 1]) || !(p.top().re > 0.0) {
        return Err(Error::Hypothesis(format!(
            "need Re s_r < {} and Re s_(r+1) > 0, got {} and {}",
            alphas[r - 1],
            p.last().re,
            p.top().re
        )));
    }
    guard_singular(p, coeffs)?;
    refine(tol, |st| {
        let mut params = Vec::new();
        let (lhs, t) = mt_direct(p, coeffs, st)?;
        params.push(TruncationRecord::from_series("lhs", "direct", &t));
        let corr = correction_term(p, coeffs, st, &mut params)?;
        let rhs = corr + untwisted_side(p, coeffs, st, &mut params)?;
        Ok(FEReport::new(
            "lemma34_1",
            p.s().to_vec(),
            labels(coeffs),
            lhs,
            rhs,
            tol,
            params,
        ))
    })
}

/// The modified function `G_r` against the `F_1^+-` pair, for last sequence
/// one. The pair is continued where its defining series diverges.
pub fn check_thm_21(p: &MtPoint, coeffs: &[CoefficientSequence], tol: f64) -> Result<FEReport> {
    check_tol(tol)?;
    require_depth(p, coeffs)?;
    require_last_ones(coeffs)?;
    guard_singular(p, coeffs)?;
    refine(tol, |st| {
        let mut params = Vec::new();
        let g = big_g_modified(p, coeffs, st)?;
        params.push(TruncationRecord::from_value("lhs", &g.main));
        params.push(TruncationRecord {
            term: "inner".into(),
            route: "gamma-weighted".into(),
            caps: Vec::new(),
            error_bound: g.error - g.main.error,
            terms_used: 0,
        });
        let rhs = untwisted_side(p, coeffs, st, &mut params)?;
        Ok(FEReport::new(
            "thm21",
            p.s().to_vec(),
            labels(coeffs),
            g.value,
            rhs,
            tol,
            params,
        ))
    })
}

fn primitive(chi: &DirichletCharacter) -> Result<()> {
    if chi.modulus() > 1 && chi.is_primitive() {
        Ok(())
    } else {
        Err(Error::NotPrimitive {
            q: chi.modulus(),
            index: chi.index(),
        })
    }
}

/// `L_MT,r` with a primitive character `chi_r` mod `q > 1` in the last slot
/// against `q^{-1/2} eps(chi_r) (2 pi/q)^w Gamma(1-s_r)
/// {e^{i pi (w+kappa)/2} F_q^+ + e^{-i pi (w+kappa)/2} F_q^-}` where the
/// F series carry `conj(chi_r)` in the divisor slot.
pub fn check_thm_22(p: &MtPoint, coeffs: &[CoefficientSequence], tol: f64) -> Result<FEReport> {
    check_tol(tol)?;
    let r = require_depth(p, coeffs)?;
    let chi = coeffs[r - 1].as_character().ok_or_else(|| {
        Error::Hypothesis(format!(
            "last sequence {} is not a character",
            coeffs[r - 1].label()
        ))
    })?;
    primitive(chi)?;
    guard_singular(p, coeffs)?;
    let q = chi.modulus() as f64;
    let kappa = chi.parity() as f64;
    let eps = gauss_sum(chi).epsilon;
    refine(tol, |st| {
        let mut params = Vec::new();
        let lhs = mt_eval(p, coeffs, st)?;
        params.push(TruncationRecord::from_value("lhs", &lhs));
        let mut dual = coeffs.to_vec();
        dual[r - 1] = coeffs[r - 1].conj();
        let w = shifted_sum(p);
        let g = gamma(real(1.0) - p.last())
            .map_err(|_| Error::Singular("Gamma pole at 1 - s_r".into()))?;
        let scale = eps / q.sqrt() * real_pow(2.0 * PI / q, w) * g;
        let pair = f_pair(
            q,
            p,
            &dual,
            w + kappa,
            st / scale.norm().max(1.0),
            &mut params,
        )?;
        Ok(FEReport::new(
            "thm22",
            p.s().to_vec(),
            labels(coeffs),
            lhs.value,
            scale * pair,
            tol,
            params,
        ))
    })
}

/// `(s_1, ..., s_{r+1}) -> (-s_1, ..., -s_{r-1}, 1 - s_{r+1}, 1 - s_r)`.
pub fn reflect(p: &MtPoint) -> MtPoint {
    let r = p.depth();
    let mut s: Vec<Complex64> = p.s()[..r - 1].iter().map(|&z| -z).collect();
    s.push(real(1.0) - p.top());
    s.push(real(1.0) - p.last());
    MtPoint::new(s).expect("reflection of a valid point")
}

/// `sum_l sigma(l) Psi(s_{r+1}, s_r + s_{r+1}; +-2 pi i (l_1 + ... + l_{r-1}))`
/// with the common-divisor sum
/// `sigma(l) = sum_{n | gcd(l)} prod (l_j/n)^{s_j} ((l_1+...+l_{r-1})/n)^{s_r+s_{r+1}-1}`.
///
/// The Kummer transformation turns it into `(+-2 pi i)^{-w} F_1^+-` at the
/// reflected point, which also continues it where it diverges.
pub fn sigma_psi_sum(
    p: &MtPoint,
    sign: i32,
    tol: f64,
) -> Result<(Complex64, SeriesTruncation, String)> {
    let refl = reflect(p);
    let ones = vec![CoefficientSequence::ones(); p.depth()];
    let w = shifted_sum(p);
    let factor = principal_power(&BranchedBase::imaginary(sign as f64 * 2.0 * PI), -w)?;
    let (v, t, route) = f_value(1.0, &refl, &ones, sign, tol / factor.norm().max(1.0))?;
    Ok((factor * v, t, route))
}

/// The reflection identity for Mordell-Tornheim zeta values with the
/// modified function `g`:
/// `g(refl)/(i^w Gamma(s_{r+1})) + e^{i pi w/2} F^+ + e^{-i pi w/2} F^-
///  = g(s)/((2 pi)^w Gamma(1-s_r)) + e^{-i pi w/2} (S^+ + S^-)`
/// where `S^+-` are the divisor-weighted `Psi` sums of [`sigma_psi_sum`].
pub fn check_thm_12(p: &MtPoint, tol: f64) -> Result<FEReport> {
    check_tol(tol)?;
    let r = p.depth();
    if r < 2 {
        return Err(Error::InvalidInput(format!("need depth >= 2, got {r}")));
    }
    let ones = vec![CoefficientSequence::ones(); r];
    let refl = reflect(p);
    guard_singular(p, &ones)?;
    guard_singular(&refl, &ones)?;
    refine(tol, |st| {
        let w = shifted_sum(p);
        let mut params = Vec::new();

        let g_refl = g_modified(&refl, st)?;
        params.push(TruncationRecord::from_value("g(reflected)", &g_refl.main));
        let g_s = g_modified(p, st)?;
        params.push(TruncationRecord::from_value("g", &g_s.main));

        let lhs = g_refl.value * rgamma(p.top()) / exp_i_half_pi(w)
            + f_pair(1.0, p, &ones, w, st, &mut params)?;

        let (sp, tp, rp) = sigma_psi_sum(p, 1, st)?;
        let (sm, tm, rm) = sigma_psi_sum(p, -1, st)?;
        params.push(TruncationRecord::from_series("S+", &rp, &tp));
        params.push(TruncationRecord::from_series("S-", &rm, &tm));
        let rhs = g_s.value * rgamma(real(1.0) - p.last()) / real_pow(2.0 * PI, w)
            + exp_i_half_pi(-w) * (sp + sm);
        Ok(FEReport::new(
            "thm12",
            p.s().to_vec(),
            labels(&ones),
            lhs,
            rhs,
            tol,
            params,
        ))
    })
}

/// `L_2(s_1, s_2; A) = sum a(n) m^{-s_1} (m+n)^{-s_2}` against
/// `Gamma(1-s_1) Gamma(s_1+s_2-1)/Gamma(s_2) L(s_1+s_2-1; A) + Gamma(1-s_1) {F_+ + F_-}`,
/// evaluated as the depth-two series at `(0, s_1, s_2)` with sequences `(A, 1)`.
pub fn check_cm(
    s1: Complex64,
    s2: Complex64,
    a: &CoefficientSequence,
    tol: f64,
) -> Result<FEReport> {
    check_tol(tol)?;
    let p = MtPoint::new(vec![real(0.0), s1, s2])?;
    let coeffs = [a.clone(), CoefficientSequence::ones()];
    guard_singular(&p, &coeffs)?;
    refine(tol, |st| {
        let mut params = Vec::new();
        let lhs = mt_eval(&p, &coeffs, st)?;
        params.push(TruncationRecord::from_value("lhs", &lhs));
        let corr = correction_term(&p, &coeffs, st, &mut params)?;
        let rhs = corr + untwisted_side(&p, &coeffs, st, &mut params)?;
        Ok(FEReport::new(
            "cm",
            vec![s1, s2],
            vec![a.label().into()],
            lhs.value,
            rhs,
            tol,
            params,
        ))
    })
}

/// Which family of hyperplanes `s_1 + s_2 = const` a check runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hyperplane {
    /// `s_1 + s_2 = 2k + 1`, for `chi_1(-1) chi_2(-1) = 1`.
    Odd,
    /// `s_1 + s_2 = 2k`, for `chi_1(-1) chi_2(-1) = -1`.
    Even,
}

/// Input of [`check_kmt`]. `s2` is derived from `s1` and `k`; when given it
/// must lie on the hyperplane. `plane` defaults to the one the parities
/// select.
#[derive(Debug, Clone, PartialEq)]
pub struct KmtInput {
    pub s1: Complex64,
    pub s2: Option<Complex64>,
    pub k: i64,
    pub plane: Option<Hyperplane>,
    pub chi1: DirichletCharacter,
    pub chi2: DirichletCharacter,
}

fn double_l(
    s1: Complex64,
    s2: Complex64,
    c1: &DirichletCharacter,
    c2: &DirichletCharacter,
    tol: f64,
    term: &str,
    params: &mut Vec<TruncationRecord>,
) -> Result<Complex64> {
    let p = MtPoint::new(vec![real(0.0), s1, s2])?;
    let coeffs = [
        CoefficientSequence::from_character(c2.clone()),
        CoefficientSequence::from_character(c1.clone()),
    ];
    let v = mt_eval(&p, &coeffs, tol)?;
    params.push(TruncationRecord::from_value(term, &v));
    Ok(v.value)
}

/// Double L-function functional equation on a hyperplane:
/// `(2 pi i/q)^{(1-s_1-s_2)/2} Gamma(s_2)/tau(chi_1) L_2(s_1, s_2; chi_1, chi_2)
///  = (2 pi i/q)^{(s_1+s_2-1)/2} Gamma(1-s_1)/tau(conj chi_2) L_2(1-s_2, 1-s_1; conj chi_2, conj chi_1)`.
pub fn check_kmt(input: &KmtInput, tol: f64) -> Result<FEReport> {
    check_tol(tol)?;
    let (c1, c2) = (&input.chi1, &input.chi2);
    primitive(c1)?;
    primitive(c2)?;
    if c1.modulus() != c2.modulus() {
        return Err(Error::InvalidInput(format!(
            "characters have moduli {} and {}",
            c1.modulus(),
            c2.modulus()
        )));
    }
    let product: i32 = if (c1.parity() + c2.parity()) % 2 == 0 {
        1
    } else {
        -1
    };
    let natural = if product == 1 {
        Hyperplane::Odd
    } else {
        Hyperplane::Even
    };
    let plane = input.plane.unwrap_or(natural);
    let sum = match plane {
        Hyperplane::Odd => 2 * input.k + 1,
        Hyperplane::Even => 2 * input.k,
    };
    if plane != natural {
        return Err(Error::ParityMismatch { product });
    }
    let s1 = input.s1;
    let s2 = real(sum as f64) - s1;
    if let Some(given) = input.s2 {
        if (given - s2).norm() > 1e-12 * (1.0 + s2.norm()) {
            return Err(Error::HyperplaneMismatch { expected: sum });
        }
    }
    let q = c1.modulus() as f64;
    refine(tol, |st| {
        let mut params = Vec::new();
        let base = BranchedBase::imaginary(2.0 * PI / q);
        let one = real(1.0);
        let l = double_l(s1, s2, c1, c2, st, "lhs", &mut params)?;
        let l_dual = double_l(
            one - s2,
            one - s1,
            &c2.conj(),
            &c1.conj(),
            st,
            "rhs",
            &mut params,
        )?;
        let g2 = gamma(s2).map_err(|_| Error::Singular(format!("Gamma pole at s2 = {s2}")))?;
        let g1 = gamma(one - s1)
            .map_err(|_| Error::Singular(format!("Gamma pole at 1 - s1 = {}", one - s1)))?;
        let lhs = principal_power(&base, (one - s1 - s2) / 2.0)? * g2 / gauss_sum(c1).tau * l;
        let rhs = principal_power(&base, (s1 + s2 - one) / 2.0)? * g1 / gauss_sum(&c2.conj()).tau
            * l_dual;
        let labels = vec![
            format!("char:{}:{}", c1.modulus(), c1.index()),
            format!("char:{}:{}", c2.modulus(), c2.index()),
        ];
        Ok(FEReport::new(
            "kmt",
            vec![s1, s2],
            labels,
            lhs,
            rhs,
            tol,
            params,
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mt::sigma_mt_common;
    use crate::psi::psi;
    use crate::zeta_l::character;

    fn ones(r: usize) -> Vec<CoefficientSequence> {
        vec![CoefficientSequence::ones(); r]
    }

    fn pt(s: &[f64]) -> MtPoint {
        MtPoint::real(s).unwrap()
    }

    fn chi(q: u64, i: usize) -> CoefficientSequence {
        CoefficientSequence::character(q, i).unwrap()
    }

    #[test]
    fn direct_region_identity_depth_two() {
        let p = pt(&[3.0, -0.5, 4.0]);
        for coeffs in [ones(2), vec![chi(4, 1), CoefficientSequence::ones()]] {
            let r = check_lemma_34_1(&p, &coeffs, 1e-6).unwrap();
            assert!(r.passed(), "{r:?}");
            assert!(r.params.iter().any(|t| t.term == "F+"));
        }
    }

    #[test]
    fn direct_region_hypotheses() {
        let e = check_lemma_34_1(&pt(&[3.0, 0.5, 4.0]), &ones(2), 1e-6).unwrap_err();
        assert!(matches!(e, Error::Hypothesis(_)));
        let e = check_lemma_34_1(&pt(&[3.0, -0.5, 4.0]), &[CoefficientSequence::ones(), chi(4, 1)], 1e-6);
        assert!(matches!(e, Err(Error::Hypothesis(_))));
        let e = check_lemma_34_1(&pt(&[0.2, -0.5, 1.0]), &ones(2), 1e-6);
        assert!(matches!(e, Err(Error::Hypothesis(_))));
        assert!(check_lemma_34_1(&pt(&[3.0, -0.5, 4.0]), &ones(2), 0.0).is_err());
    }

    #[test]
    fn modified_function_identity() {
        let r = check_thm_21(&pt(&[3.0, -0.5, 4.0]), &ones(2), 1e-6).unwrap();
        assert!(r.passed(), "{r:?}");
        let r = check_thm_21(&pt(&[3.0, 0.5, 0.2]), &ones(2), 1e-5).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.params.iter().any(|t| t.route.starts_with("continued")));
        let fin = CoefficientSequence::parse("finite:[1,-1,0,2]").unwrap();
        let r = check_thm_21(&pt(&[2.5, -0.5, 3.5]), &[fin, CoefficientSequence::ones()], 1e-6).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn both_entry_points_agree() {
        let p = pt(&[3.0, -0.5, 4.0]);
        let a = check_lemma_34_1(&p, &ones(2), 1e-6).unwrap();
        let b = check_thm_21(&p, &ones(2), 1e-6).unwrap();
        assert!(((a.lhs - a.rhs) - (b.lhs - b.rhs)).norm() <= a.error_bound + b.error_bound + 1e-15);
    }

    #[test]
    fn singular_and_gamma_guards() {
        assert!(matches!(
            check_thm_21(&pt(&[0.5, 0.5, 0.5]), &ones(2), 1e-6),
            Err(Error::Singular(_))
        ));
        assert!(matches!(
            check_thm_21(&pt(&[3.0, 3.0, 3.0]), &ones(2), 1e-6),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn twisted_identity() {
        let p = pt(&[3.0, -0.5, 4.0]);
        let r = check_thm_22(&p, &[CoefficientSequence::ones(), chi(4, 1)], 1e-6).unwrap();
        assert!(r.passed(), "{r:?}");
        let r = check_thm_22(&p, &[chi(5, 2), chi(4, 1)], 1e-6).unwrap();
        assert!(r.passed(), "{r:?}");
        for i in 1..4 {
            let r = check_thm_22(&p, &[CoefficientSequence::ones(), chi(5, i)], 1e-6).unwrap();
            assert!(r.passed(), "index {i}: {r:?}");
        }
        let e = check_thm_22(&p, &[CoefficientSequence::ones(), chi(4, 0)], 1e-6).unwrap_err();
        assert!(matches!(e, Error::NotPrimitive { q: 4, .. }));
        let e = check_thm_22(&p, &ones(2), 1e-6).unwrap_err();
        assert!(matches!(e, Error::Hypothesis(_)));
    }

    #[test]
    fn reflection_identity_depth_two() {
        for s in [[3.0, -0.5, 4.0], [2.5, -0.7, 3.8]] {
            let r = check_thm_12(&pt(&s), 1e-5).unwrap();
            assert!(r.passed(), "{s:?}: {r:?}");
        }
    }

    #[test]
    fn reflection_is_an_involution() {
        let p = MtPoint::new(vec![Complex64::new(1.0, 2.0), Complex64::new(-0.5, 1.0), Complex64::new(4.0, -3.0)]).unwrap();
        assert_eq!(reflect(&reflect(&p)), p);
    }

    #[test]
    fn sigma_psi_sum_matches_direct_summation() {
        // sigma grows like l^{-1/2} and Psi decays like l^{-3} here
        let p = pt(&[-3.0, 0.5, 3.0]);
        let w = p.last() + p.top() - 1.0;
        let (via_f, _, _) = sigma_psi_sum(&p, 1, 1e-11).unwrap();
        let mut direct = Complex64::zero();
        for l in 1..=3000u64 {
            let sigma = sigma_mt_common(&[p.get(1), w], &[l]).unwrap();
            let x = BranchedBase::imaginary(2.0 * PI * l as f64);
            direct += sigma * psi(p.top(), p.last() + p.top(), &x).unwrap().value;
        }
        assert!((via_f - direct).norm() < 1e-8, "{via_f} vs {direct}");
    }

    #[test]
    fn double_series_with_sequence() {
        let a = CoefficientSequence::parse("finite:[0,1]").unwrap();
        let r = check_cm(real(-0.5), real(4.0), &a, 1e-6).unwrap();
        assert!(r.passed(), "{r:?}");
        let brute: f64 = (1..=20000).map(|m| (m as f64).sqrt() * (m as f64 + 2.0).powi(-4)).sum();
        assert!((r.lhs.re - brute).abs() < 1e-9, "{} vs {brute}", r.lhs);
        for a in [CoefficientSequence::ones(), chi(4, 1)] {
            let r = check_cm(real(-0.5), real(4.0), &a, 1e-6).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }

    fn kmt(i: usize, j: usize, k: i64, s1: f64) -> KmtInput {
        KmtInput {
            s1: real(s1),
            s2: None,
            k,
            plane: None,
            chi1: character(5, i).unwrap(),
            chi2: character(5, j).unwrap(),
        }
    }

    #[test]
    fn double_l_hyperplanes() {
        let r = check_kmt(&kmt(2, 2, 2, -0.5), 1e-5).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.point[1], real(5.5));
        let r = check_kmt(&kmt(1, 1, 2, -0.3), 1e-5).unwrap();
        assert!(r.passed(), "{r:?}");
        // mixed parity: even hyperplane
        let r = check_kmt(&kmt(2, 1, 1, -0.5), 1e-5).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.point[1], real(2.5));
        let r = check_kmt(&kmt(1, 3, 1, -0.4), 1e-5).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn double_l_guards() {
        let mut input = kmt(2, 1, 2, -0.5);
        input.plane = Some(Hyperplane::Odd);
        assert!(matches!(check_kmt(&input, 1e-5), Err(Error::ParityMismatch { product: -1 })));
        let mut input = kmt(2, 2, 2, -0.5);
        input.s2 = Some(real(5.0));
        assert!(matches!(check_kmt(&input, 1e-5), Err(Error::HyperplaneMismatch { expected: 5 })));
        input.s2 = Some(real(5.5));
        assert!(check_kmt(&input, 1e-5).is_ok());
        let mut input = kmt(2, 2, 2, -0.5);
        input.chi1 = character(5, 0).unwrap();
        assert!(matches!(check_kmt(&input, 1e-5), Err(Error::NotPrimitive { .. })));
    }
}
