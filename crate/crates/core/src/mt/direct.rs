//! Direct summation over a box `m_j <= L_j` with a rigorous tail bound.
//!
//! For the region `m_j > L_j` the weight `(m_1+...+m_r)^{-sigma_{r+1}}` is
//! split across the variables. When `sigma_{r+1} >= 0`,
//! `(m_1+...+m_r) >= prod m_i^{theta_i}` for any `theta` in the simplex, so
//! the region sum is at most
//! `C_j L_j^{1-e_j}/(e_j-1) prod_{i != j} C_i zeta(e_i)` with
//! `e_i = sigma_i - alpha_i + theta_i sigma_{r+1}`. When `sigma_{r+1} < 0`
//! the power mean inequality `(sum m_i)^p <= r^{p-1} sum m_i^p` splits the
//! weight into `r` products. An integral bound on `zeta(e)` keeps it closed.
//! `theta` is chosen on a grid to minimise each `L_j`.

use alloc::{vec, vec::Vec};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::{Float, Zero};

use super::coeffs::CoefficientSequence;
use super::region::{in_convergence_region, MtPoint, MAX_DEPTH};
use crate::complex::real_pow;
use crate::error::{Error, Result};

/// Default limit on `prod L_j`.
pub const DEFAULT_TERM_BUDGET: f64 = 1e8;
/// Required slack in every subset inequality.
pub const REGION_MARGIN: f64 = 0.2;
/// Exponents closer to 1 than this are treated as divergent.
const EXPONENT_FLOOR: f64 = 1.0 + 1e-3;

/// Truncation record of a summed series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTruncation {
    /// Cap per summation index.
    pub caps: Vec<usize>,
    /// Bound on the omitted part.
    pub tail_bound: f64,
    pub terms_used: u64,
}

/// `zeta(e) <= 1 + 2^{-e} + 2^{1-e}/(e-1)`.
fn zeta_upper(e: f64) -> f64 {
    let h = 0.5f64.powf(e);
    1.0 + h + 2.0 * h / (e - 1.0)
}

/// `sum_t A_t L^{1-e_t}/(e_t - 1)`, decreasing in `L`.
#[derive(Debug, Clone)]
struct TailForm {
    terms: Vec<(f64, f64)>,
}

impl TailForm {
    fn at(&self, l: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(a, e)| a * l.powf(1.0 - e) / (e - 1.0))
            .sum()
    }

    /// Smallest integer `L >= 1` with `at(L) <= tol`.
    fn cap_for(&self, tol: f64) -> f64 {
        if self.at(1.0) <= tol {
            return 1.0;
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while self.at(hi.exp()) > tol {
            lo = hi;
            hi *= 2.0;
            if hi > 200.0 {
                return f64::INFINITY;
            }
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.at(mid.exp()) > tol {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi.exp().ceil()
    }
}

/// Tail-bound forms, one per index, for exponents `x_i = sigma_i - alpha_i`,
/// constants `c_i` and top exponent `top`, optimised for `tol`.
fn tail_forms(x: &[f64], c: &[f64], top: f64, tol: f64) -> Vec<(TailForm, f64)> {
    let r = x.len();
    let tol_j = tol / r as f64;
    let mut out = Vec::with_capacity(r);
    if top < 0.0 {
        let p = -top;
        let k = (r as f64).powf((p - 1.0).max(0.0));
        for j in 0..r {
            let mut form = TailForm { terms: Vec::new() };
            let mut ok = true;
            for split in 0..r {
                let e = |i: usize| x[i] + if i == split { top } else { 0.0 };
                let mut a = k * c[j];
                for i in (0..r).filter(|&i| i != j) {
                    if e(i) < EXPONENT_FLOOR {
                        ok = false;
                    }
                    a *= c[i] * zeta_upper(e(i));
                }
                if e(j) < EXPONENT_FLOOR {
                    ok = false;
                }
                form.terms.push((a, e(j)));
            }
            let cap = if ok { form.cap_for(tol_j) } else { f64::INFINITY };
            out.push((form, cap));
        }
        return out;
    }
    let grid = simplex_grid(r);
    for j in 0..r {
        let mut best: Option<(TailForm, f64)> = None;
        for theta in &grid {
            let e: Vec<f64> = (0..r).map(|i| x[i] + theta[i] * top).collect();
            if e.iter().any(|&v| v < EXPONENT_FLOOR) {
                continue;
            }
            let mut a = c[j];
            for i in (0..r).filter(|&i| i != j) {
                a *= c[i] * zeta_upper(e[i]);
            }
            let form = TailForm {
                terms: vec![(a, e[j])],
            };
            let cap = form.cap_for(tol_j);
            if best.as_ref().is_none_or(|b| cap < b.1) {
                best = Some((form, cap));
            }
        }
        out.push(best.unwrap_or((TailForm { terms: Vec::new() }, f64::INFINITY)));
    }
    out
}

fn simplex_grid(r: usize) -> Vec<Vec<f64>> {
    let m = match r {
        1 => 1,
        2 => 400,
        3 => 60,
        _ => 20,
    };
    let mut out = Vec::new();
    let mut cur = vec![0usize; r];
    fn rec(k: usize, left: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if k + 1 == cur.len() {
            cur[k] = left;
            out.push(cur.iter().map(|&v| v as f64 / m as f64).collect());
            return;
        }
        for v in 0..=left {
            cur[k] = v;
            rec(k + 1, left - v, m, cur, out);
        }
    }
    rec(0, m, m, &mut cur, &mut out);
    out
}

/// Precomputed box sum for fixed `s_1, ..., s_r` and a top exponent with
/// fixed real part.
#[derive(Debug, Clone)]
pub(crate) struct DirectPlan {
    caps: Vec<usize>,
    tail_bound: f64,
    rows: Vec<Vec<Complex64>>,
}

impl DirectPlan {
    /// Plans the caps for `p` (its top exponent's real part fixes the tail
    /// bound) and precomputes `a_j(m) m^{-s_j}`.
    pub(crate) fn new(
        p: &MtPoint,
        coeffs: &[CoefficientSequence],
        tol: f64,
        budget: f64,
    ) -> Result<Self> {
        check_inputs(p, coeffs, tol)?;
        let alphas: Vec<f64> = coeffs.iter().map(|a| a.alpha()).collect();
        let region = in_convergence_region(p, &alphas)?;
        if region.slack < REGION_MARGIN {
            return Err(Error::Region {
                witness: region.witness,
                slack: region.slack,
            });
        }
        let r = p.depth();
        let x: Vec<f64> = (0..r).map(|k| p.s()[k].re - alphas[k]).collect();
        let c: Vec<f64> = coeffs.iter().map(|a| a.bound_constant()).collect();
        let forms = tail_forms(&x, &c, p.top().re, tol);
        let needed: f64 = forms.iter().map(|f| f.1).product();
        if !(needed <= budget) {
            return Err(Error::Budget { needed, budget });
        }
        let caps: Vec<usize> = forms.iter().map(|f| f.1 as usize).collect();
        let tail_bound = forms
            .iter()
            .zip(&caps)
            .map(|((form, _), &l)| form.at(l as f64))
            .sum();
        let rows = (0..r)
            .map(|j| {
                (1..=caps[j])
                    .map(|m| {
                        let v = coeffs[j].value(m as u64);
                        if v.is_zero() {
                            v
                        } else {
                            v * real_pow(m as f64, -p.s()[j])
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            caps,
            tail_bound,
            rows,
        })
    }

    pub(crate) fn terms(&self) -> u64 {
        self.caps.iter().map(|&l| l as u64).product()
    }

    pub(crate) fn truncation(&self) -> SeriesTruncation {
        SeriesTruncation {
            caps: self.caps.clone(),
            tail_bound: self.tail_bound,
            terms_used: self.terms(),
        }
    }

    /// Box sum with top exponent `w`.
    pub(crate) fn sum(&self, w: Complex64) -> Complex64 {
        let total: usize = self.caps.iter().sum();
        let top: Vec<Complex64> = (0..=total)
            .map(|n| {
                if n == 0 {
                    Complex64::zero()
                } else {
                    real_pow(n as f64, -w)
                }
            })
            .collect();
        self.level(0, Complex64::new(1.0, 0.0), 0, &top)
    }

    fn level(&self, k: usize, prod: Complex64, offset: usize, top: &[Complex64]) -> Complex64 {
        let row = &self.rows[k];
        if k + 1 == self.rows.len() {
            let mut acc = Complex64::zero();
            for (m, v) in row.iter().enumerate() {
                acc += v * top[offset + m + 1];
            }
            return acc * prod;
        }
        let mut acc = Complex64::zero();
        for (m, v) in row.iter().enumerate() {
            if !v.is_zero() {
                acc += self.level(k + 1, prod * v, offset + m + 1, top);
            }
        }
        acc
    }
}

pub(crate) fn check_inputs(p: &MtPoint, coeffs: &[CoefficientSequence], tol: f64) -> Result<()> {
    let r = p.depth();
    if coeffs.len() != r {
        return Err(Error::InvalidInput(alloc::format!(
            "{} coefficient sequences for depth {r}",
            coeffs.len()
        )));
    }
    if r > MAX_DEPTH {
        return Err(Error::OutOfRange {
            what: "depth",
            value: r,
            max: MAX_DEPTH,
        });
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidInput(alloc::format!("tolerance {tol}")));
    }
    Ok(())
}

/// `sum a_1(m_1)...a_r(m_r) m_1^{-s_1}...m_r^{-s_r} (m_1+...+m_r)^{-s_{r+1}}`
/// over a box whose tail is bounded by `tol`, with the default term budget.
pub fn mt_direct(
    p: &MtPoint,
    coeffs: &[CoefficientSequence],
    tol: f64,
) -> Result<(Complex64, SeriesTruncation)> {
    mt_direct_with_budget(p, coeffs, tol, DEFAULT_TERM_BUDGET)
}

/// [`mt_direct`] with an explicit limit on the number of terms.
pub fn mt_direct_with_budget(
    p: &MtPoint,
    coeffs: &[CoefficientSequence],
    tol: f64,
    budget: f64,
) -> Result<(Complex64, SeriesTruncation)> {
    let plan = DirectPlan::new(p, coeffs, tol, budget)?;
    Ok((plan.sum(p.top()), plan.truncation()))
}
