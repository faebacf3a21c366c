//! Hurwitz and Riemann zeta, Dirichlet L-functions and the two classical
//! functional equations.

use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::{Float, Zero};

use super::characters::{gauss_sum, DirichletCharacter};
use crate::complex::{exprel, gamma, log_gamma, real, EM_WEIGHTS};
use crate::error::{Error, Result};

/// `|Im s|` limit of the validated accuracy envelope.
pub const IM_ENVELOPE: f64 = 1.0e3;
/// Number of Bernoulli correction terms.
const EM_ORDER: usize = 12;
const EM_REL_TOL: f64 = 1e-12;
const EM_RETRIES: usize = 4;

fn initial_cutoff(s: Complex64) -> usize {
    // small enough to limit cancellation when Re s < 0; the remainder check
    // doubles it when the correction series has not settled
    10usize.max((s.norm() / 2.0).ceil() as usize)
}

/// Bernoulli corrections `X^{-s}/2 + sum_k B_2k/(2k)! (s)_{2k-1} X^{-s-2k+1}`
/// together with the magnitude of the first omitted term.
fn em_corrections(s: Complex64, x: f64) -> (Complex64, f64) {
    let xs = (-s * x.ln()).exp();
    let mut sum = xs * 0.5;
    // (s)_{2k-1} X^{-s-2k+1}, advanced by (s+2k-1)(s+2k)/X^2
    let mut t = s * xs / x;
    let x2 = x * x;
    for (k, w) in EM_WEIGHTS.iter().take(EM_ORDER).enumerate() {
        sum += t * *w;
        let k = k as f64 + 1.0;
        t *= (s + (2.0 * k - 1.0)) * (s + 2.0 * k) / x2;
    }
    let next = (t * EM_WEIGHTS[EM_ORDER]).norm();
    (sum, next)
}

fn check_envelope(s: Complex64) -> Result<()> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::InvalidInput(alloc::format!("non-finite s = {s}")));
    }
    if s.im.abs() > IM_ENVELOPE {
        return Err(Error::Envelope {
            s,
            limit: IM_ENVELOPE,
        });
    }
    Ok(())
}

fn near_one(s: Complex64) -> bool {
    (s - 1.0).norm() < 1e-14
}

/// `zeta(s, a) = sum_{n>=0} (n+a)^{-s}`, continued to `s != 1`, for
/// `0 < a <= 1`.
pub fn hurwitz_zeta(s: Complex64, a: f64) -> Result<Complex64> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::InvalidInput(alloc::format!(
            "Hurwitz shift a = {a} outside (0, 1]"
        )));
    }
    check_envelope(s)?;
    if near_one(s) {
        return Err(Error::Pole {
            what: "Hurwitz zeta",
            s,
        });
    }
    let mut m = initial_cutoff(s);
    for _ in 0..EM_RETRIES {
        let mut head = Complex64::zero();
        for n in 0..m {
            head += (-s * (n as f64 + a).ln()).exp();
        }
        let x = m as f64 + a;
        let pole_term = (-(s - 1.0) * x.ln()).exp() / (s - 1.0);
        let (corr, next) = em_corrections(s, x);
        let value = head + pole_term + corr;
        if next <= EM_REL_TOL * value.norm().max(1e-6) {
            return Ok(value);
        }
        m *= 2;
    }
    Err(Error::Nonconvergence {
        what: "Euler-Maclaurin",
        detail: alloc::format!("remainder check failed for zeta({s}, {a})"),
    })
}

/// Below this real part the summed head cancels against the corrections and
/// values are taken from `1 - s` instead.
const REFLECT_BELOW: f64 = -0.5;

/// `zeta(s)` by Euler-Maclaurin alone. Accurate for `Re s >= -1/2`; further
/// left the cancellation costs about `eps X^{1 - Re s}` in absolute terms.
pub fn riemann_zeta_em(s: Complex64) -> Result<Complex64> {
    hurwitz_zeta(s, 1.0)
}

/// `zeta(s)`; left of `Re s = -1/2` through
/// `zeta(s) = 2^s pi^{s-1} sin(pi s/2) Gamma(1-s) zeta(1-s)`.
pub fn riemann_zeta(s: Complex64) -> Result<Complex64> {
    check_envelope(s)?;
    if s.re >= REFLECT_BELOW {
        return riemann_zeta_em(s);
    }
    let w = 1.0 - s;
    let i = Complex64::i();
    // sin(pi s/2) = e^{-+ i pi s/2} (+-(e^{+- i pi s} - 1)) / (2i), larger exponential factored out
    let (phase, rest) = if s.im >= 0.0 {
        (-i * (PI / 2.0) * s, ((i * PI * s).exp() - 1.0) / (2.0 * i))
    } else {
        (i * (PI / 2.0) * s, (1.0 - (-i * PI * s).exp()) / (2.0 * i))
    };
    let log = s * 2f64.ln() + (s - 1.0) * PI.ln() + log_gamma(w)? + phase;
    Ok(log.exp() * rest * hurwitz_zeta(w, 1.0)?)
}

/// `L(s, chi)`; left of `Re s = -1/2` through the Hurwitz formula at
/// rational arguments,
/// `zeta(s, a/q) = 2 Gamma(1-s) (2 pi q)^{s-1} sum_n cos(pi (1-s)/2 - 2 pi n a/q) zeta(1-s, n/q)`,
/// which needs neither primitivity nor a Gauss sum.
pub fn dirichlet_l(s: Complex64, chi: &DirichletCharacter) -> Result<Complex64> {
    check_envelope(s)?;
    if s.re >= REFLECT_BELOW {
        return dirichlet_l_em(s, chi);
    }
    let q = chi.modulus();
    let qf = q as f64;
    let w = 1.0 - s;
    let i = Complex64::i();
    // cos(x - theta) with x = pi w/2: the exponential that dominates is factored out
    let (phase, small, dominant_minus) = if s.im >= 0.0 {
        (i * (PI / 2.0) * w, (-i * PI * w).exp(), true)
    } else {
        (-i * (PI / 2.0) * w, (i * PI * w).exp(), false)
    };
    let mut acc = Complex64::zero();
    for n in 1..=q {
        let mut cn = Complex64::zero();
        for a in 1..=q {
            let v = chi.value(a);
            if v.is_zero() {
                continue;
            }
            let e = crate::zeta_l::root_of_unity((n * a) % q, q);
            cn += if dominant_minus { v * (e.conj() + small * e) } else { v * (small * e.conj() + e) };
        }
        if !cn.is_zero() {
            acc += cn * hurwitz_zeta(w, n as f64 / qf)?;
        }
    }
    let log = -s * qf.ln() + (s - 1.0) * (2.0 * PI * qf).ln() + log_gamma(w)? + phase;
    Ok(log.exp() * acc)
}

/// `L(s, chi) = sum chi(n) n^{-s}` by Euler-Maclaurin alone, with the
/// accuracy caveat of [`riemann_zeta_em`].
///
/// Each residue class is summed by Euler-Maclaurin. For non-principal
/// characters the `1/(s-1)` parts are combined through the orthogonality
/// `sum chi(a) = 0`, which removes the removable singularity at `s = 1`.
pub fn dirichlet_l_em(s: Complex64, chi: &DirichletCharacter) -> Result<Complex64> {
    check_envelope(s)?;
    let q = chi.modulus();
    if q == 1 {
        return riemann_zeta_em(s);
    }
    if chi.is_principal() && near_one(s) {
        return Err(Error::Pole {
            what: "principal L-function",
            s,
        });
    }
    let qf = q as f64;
    let mut m = initial_cutoff(s);
    for _ in 0..EM_RETRIES {
        let top = m as u64 * q;
        let mut head = Complex64::zero();
        for n in 1..=top {
            let v = chi.value(n);
            if !v.is_zero() {
                head += v * (-s * (n as f64).ln()).exp();
            }
        }
        let mut pole_part = Complex64::zero();
        let mut corr = Complex64::zero();
        let mut next = 0.0;
        let q_pow = (-s * qf.ln()).exp();
        let base = top as f64;
        let one_minus_s = 1.0 - s;
        let base_pow = (one_minus_s * base.ln()).exp();
        for a in 1..=q {
            let v = chi.value(a);
            if v.is_zero() {
                continue;
            }
            let x = m as f64 + a as f64 / qf;
            let (cr, nx) = em_corrections(s, x);
            corr += v * q_pow * cr;
            next += nx * q_pow.norm();
            if chi.is_principal() {
                pole_part += v * (one_minus_s * (base + a as f64).ln()).exp() / (qf * (s - 1.0));
            } else {
                // ((Mq+a)^{1-s} - (Mq)^{1-s}) / (q (s-1))
                let d = (a as f64 / base).ln_1p();
                pole_part -= v * base_pow * d * exprel(one_minus_s * d) / qf;
            }
        }
        let value = head + pole_part + corr;
        if next <= EM_REL_TOL * value.norm().max(1e-6) {
            return Ok(value);
        }
        m *= 2;
    }
    Err(Error::Nonconvergence {
        what: "Euler-Maclaurin",
        detail: alloc::format!("remainder check failed for L({s}, chi mod {q})"),
    })
}

/// `zeta(s) 2^{1-s} pi^{-s} Gamma(s) cos(pi s / 2)`, which equals `zeta(1-s)`.
pub fn fe_zeta_rhs(s: Complex64) -> Result<Complex64> {
    let z = riemann_zeta(s)?;
    let g = gamma(s)?;
    let factor = ((1.0 - s) * 2f64.ln() - s * PI.ln()).exp();
    Ok(z * factor * g * (s * (PI / 2.0)).cos())
}

/// `eps(chi) L(s, conj chi) 2^{1-s} pi^{-s} q^{s-1/2} Gamma(s) cos(pi (s-kappa)/2)`,
/// which equals `L(1-s, chi)` for primitive `chi`.
pub fn fe_l_rhs(s: Complex64, chi: &DirichletCharacter) -> Result<Complex64> {
    if !chi.is_primitive() {
        return Err(Error::NotPrimitive {
            q: chi.modulus(),
            index: chi.index(),
        });
    }
    if chi.modulus() == 1 {
        return fe_zeta_rhs(s);
    }
    let q = chi.modulus() as f64;
    let eps = gauss_sum(chi).epsilon;
    let l = dirichlet_l(s, &chi.conj())?;
    let g = gamma(s)?;
    let factor = ((1.0 - s) * 2f64.ln() - s * PI.ln() + (s - 0.5) * q.ln()).exp();
    let kappa = chi.parity() as f64;
    Ok(eps * l * factor * g * ((s - kappa) * (PI / 2.0)).cos())
}

/// `zeta(s) prod_{p | q} (1 - p^{-s})`, the principal L-function through the
/// Euler factor correction. Test helper for the principal case.
pub fn principal_l_via_zeta(s: Complex64, q: u64) -> Result<Complex64> {
    let mut v = riemann_zeta(s)?;
    for (p, _) in crate::arith::factorize(q) {
        v *= real(1.0) - (-s * (p as f64).ln()).exp();
    }
    Ok(v)
}

