//! The modified function
//! `G_r(s) = L_MT,r(s) - Gamma(1-s_r) Gamma(s_r+s_{r+1}-1)/Gamma(s_{r+1}) L_MT,r-1(s_1,...,s_{r-1}, s_r+s_{r+1}-1)`.

use alloc::{format, vec};

use num_complex::Complex64;

use super::coeffs::CoefficientSequence;
use super::direct::check_inputs;
use super::mb::{mt_eval, MtValue};
use super::region::MtPoint;
use crate::complex::{is_gamma_pole, log_gamma, rgamma};
use crate::error::{Error, Result};

/// Value of `G_r` together with the two terms it was assembled from.
#[derive(Debug, Clone, PartialEq)]
pub struct ModifiedValue {
    pub value: Complex64,
    pub error: f64,
    /// `L_MT,r(s)`.
    pub main: MtValue,
    /// The subtracted Gamma-weighted depth `r-1` term.
    pub correction: Complex64,
}

fn singular(e: Error) -> Error {
    match e {
        Error::Pole { what, s } => Error::Singular(format!("pole of {what} at {s}")),
        Error::GammaPole { z, .. } => Error::Singular(format!("Gamma pole at {z}")),
        other => other,
    }
}

/// `Gamma(1-s_r) Gamma(s_r+s_{r+1}-1) / Gamma(s_{r+1})`, zero when `s_{r+1}`
/// is a Gamma pole.
pub fn modified_gamma_factor(p: &MtPoint) -> Result<Complex64> {
    let sr = p.last();
    let top = p.top();
    for z in [Complex64::new(1.0, 0.0) - sr, sr + top - 1.0] {
        if is_gamma_pole(z) {
            return Err(Error::Singular(format!("Gamma pole at {z}")));
        }
    }
    let den = rgamma(top);
    if den == Complex64::new(0.0, 0.0) {
        return Ok(den);
    }
    let num = log_gamma(Complex64::new(1.0, 0.0) - sr)? + log_gamma(sr + top - 1.0)?;
    Ok(num.exp() * den)
}

/// `G_r(s; a_1, ..., a_r)`, each term by the route [`mt_eval`] picks.
pub fn big_g_modified(p: &MtPoint, coeffs: &[CoefficientSequence], tol: f64) -> Result<ModifiedValue> {
    check_inputs(p, coeffs, tol)?;
    let r = p.depth();
    if r < 2 {
        return Err(Error::InvalidInput(format!("depth {r} has no modified function")));
    }
    let factor = modified_gamma_factor(p)?;
    let main = mt_eval(p, coeffs, tol).map_err(singular)?;
    let (correction, corr_err) = if factor == Complex64::new(0.0, 0.0) {
        (factor, 0.0)
    } else {
        let inner = p.inner(p.last() + p.top() - 1.0);
        let sub_tol = tol / factor.norm().max(1.0);
        let v = mt_eval(&inner, &coeffs[..r - 1], sub_tol).map_err(singular)?;
        (factor * v.value, factor.norm() * v.error)
    };
    Ok(ModifiedValue {
        value: main.value - correction,
        error: main.error + corr_err,
        main,
        correction,
    })
}

/// `g(s)`: [`big_g_modified`] with every coefficient sequence equal to one.
pub fn g_modified(p: &MtPoint, tol: f64) -> Result<ModifiedValue> {
    big_g_modified(p, &vec![CoefficientSequence::ones(); p.depth()], tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{gamma, real};
    use crate::mt::direct::mt_direct;
    use crate::zeta_l::riemann_zeta;

    #[test]
    fn gamma_pole_is_singular() {
        let p = MtPoint::real(&[3.0, 3.0, 3.0]).unwrap();
        assert!(matches!(g_modified(&p, 1e-8), Err(Error::Singular(_))));
    }

    #[test]
    fn explicit_composition() {
        let p = MtPoint::real(&[3.0, -0.5, 4.0]).unwrap();
        let g = g_modified(&p, 1e-10).unwrap();
        let (d, _) = mt_direct(&p, &[CoefficientSequence::ones(), CoefficientSequence::ones()], 1e-11).unwrap();
        let ratio = gamma(real(1.5)).unwrap() * gamma(real(2.5)).unwrap() / gamma(real(4.0)).unwrap();
        let want = d - ratio * riemann_zeta(real(5.5)).unwrap();
        assert!((g.value - want).norm() < 1e-9, "{} vs {want}", g.value);
        assert!((g.value.re + 0.10247475620194).abs() < 1e-10);
        assert!((g.main.value.re - 0.098823692348822036927).abs() < 1e-10);
    }

    #[test]
    fn linear_in_first_sequence() {
        let chi = CoefficientSequence::character(4, 1).unwrap();
        let p = MtPoint::real(&[3.0, -0.5, 4.0]).unwrap();
        let ones = CoefficientSequence::ones();
        let g1 = big_g_modified(&p, &[chi.clone(), ones.clone()], 1e-10).unwrap();
        let g2 = big_g_modified(&p, &[chi.scaled(real(2.0)), ones], 1e-10).unwrap();
        assert!(g1.value.norm() > 1e-3);
        assert!((g2.value - 2.0 * g1.value).norm() < 1e-9);
    }

    #[test]
    fn vanishing_factor_at_nonpositive_top() {
        let p = MtPoint::real(&[4.0, 4.0, -1.0]).unwrap();
        assert!(matches!(g_modified(&p, 1e-8), Err(Error::Singular(_))));
        let p = MtPoint::real(&[4.0, 3.5, 0.0]).unwrap();
        let g = g_modified(&p, 1e-8).unwrap();
        assert_eq!(g.correction, Complex64::new(0.0, 0.0));
    }
}
