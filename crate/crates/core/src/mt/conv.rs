//! gcd-divisor convolutions and the divisor sums attached to them.

use alloc::{format, vec, vec::Vec};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::{Float, One, Zero};

use super::coeffs::CoefficientSequence;
use crate::arith::{divisors, gcd_slice};
use crate::complex::real_pow;
use crate::error::{Error, Result};

fn check_ell(ell: &[u64]) -> Result<()> {
    if ell.is_empty() || ell.contains(&0) {
        return Err(Error::InvalidInput(format!(
            "indices must be a nonempty list of positive integers, got {ell:?}"
        )));
    }
    Ok(())
}

/// `sum_{n | gcd(l)} n^b a_2(l_1/n) ... a_{r+1}(l_r/n) a_1(n)`, where `a_1`
/// is `divisor_slot` and `a_2, ...` are `others` (one per entry of `ell`).
pub fn convolved_coefficient(
    b: Complex64,
    divisor_slot: &CoefficientSequence,
    others: &[CoefficientSequence],
    ell: &[u64],
) -> Result<Complex64> {
    check_ell(ell)?;
    if others.len() != ell.len() {
        return Err(Error::InvalidInput(format!(
            "{} sequences for {} indices",
            others.len(),
            ell.len()
        )));
    }
    let mut acc = Complex64::zero();
    for n in divisors(gcd_slice(ell)) {
        let mut term = real_pow(n as f64, b) * divisor_slot.value(n);
        for (a, &l) in others.iter().zip(ell) {
            term *= a.value(l / n);
        }
        acc += term;
    }
    Ok(acc)
}

fn check_svals(svals: &[Complex64], ell: &[u64]) -> Result<()> {
    check_ell(ell)?;
    if svals.len() != ell.len() + 1 {
        return Err(Error::InvalidInput(format!(
            "{} exponents for {} indices; expected one per index plus the sum exponent",
            svals.len(),
            ell.len()
        )));
    }
    Ok(())
}

/// `sum d_1^{s_1} ... d_r^{s_r} (d_1 + ... + d_r)^{s_{r+1}}` over divisor
/// tuples `d_j | l_j` with `d_j >= l_j / gcd(l)`.
pub fn sigma_mt(svals: &[Complex64], ell: &[u64]) -> Result<Complex64> {
    check_svals(svals, ell)?;
    let g = gcd_slice(ell);
    let lists: Vec<Vec<u64>> = ell
        .iter()
        .map(|&l| divisors(l).into_iter().filter(|&d| d * g >= l).collect())
        .collect();
    let r = ell.len();
    let mut acc = Complex64::zero();
    let mut idx = vec![0usize; r];
    loop {
        let mut term = Complex64::one();
        let mut sum = 0u64;
        for j in 0..r {
            let d = lists[j][idx[j]];
            term *= real_pow(d as f64, svals[j]);
            sum += d;
        }
        acc += term * real_pow(sum as f64, svals[r]);
        let mut k = 0;
        loop {
            if k == r {
                return Ok(acc);
            }
            idx[k] += 1;
            if idx[k] < lists[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// `sum_{n | gcd(l)} (l_1/n)^{s_1} ... (l_r/n)^{s_r} ((l_1+...+l_r)/n)^{s_{r+1}}`:
/// the divisor tuples are restricted to `d = l / n` for a common `n`.
pub fn sigma_mt_common(svals: &[Complex64], ell: &[u64]) -> Result<Complex64> {
    check_svals(svals, ell)?;
    let r = ell.len();
    let total: u64 = ell.iter().sum();
    let mut acc = Complex64::zero();
    for n in divisors(gcd_slice(ell)) {
        let mut term = real_pow((total / n) as f64, svals[r]);
        for j in 0..r {
            term *= real_pow((ell[j] / n) as f64, svals[j]);
        }
        acc += term;
    }
    Ok(acc)
}

/// Calls `f` with every composition of `total` into `parts` positive parts.
pub(crate) fn for_each_composition(total: usize, parts: usize, f: &mut impl FnMut(&[u64])) {
    fn rec(k: usize, left: usize, cur: &mut Vec<u64>, f: &mut impl FnMut(&[u64])) {
        let parts = cur.len();
        if k + 1 == parts {
            if left >= 1 {
                cur[k] = left as u64;
                f(cur);
            }
            return;
        }
        let rest = parts - k - 1;
        if left < rest + 1 {
            return;
        }
        for v in 1..=left - rest {
            cur[k] = v as u64;
            rec(k + 1, left - v, cur, f);
        }
    }
    if parts == 0 || total < parts {
        return;
    }
    let mut cur = vec![0u64; parts];
    rec(0, total, &mut cur, f);
}

/// Coefficients grouped by the sum of the indices:
/// `D(L) = sum_{l_1+...+l_{r-1} = L} conv(l) / (l_1^{s_1} ... l_{r-1}^{s_{r-1}})`
/// with `conv(l) = sum_{n | gcd(l)} n^b a_1(l_1/n) ... a_{r-1}(l_{r-1}/n) a_r(n)`,
/// together with `sum |conv(l)| / prod l_j^{sigma_j}`.
///
/// Built once for a cap and then only read.
#[derive(Debug, Clone)]
pub struct ConvolutionTable {
    labels: Vec<alloc::string::String>,
    b: Complex64,
    values: Vec<Complex64>,
    abs: Vec<f64>,
}

impl ConvolutionTable {
    /// `slots` are `a_1, ..., a_{r-1}`, `divisor_slot` is `a_r`, and `s` the
    /// exponents `s_1, ..., s_{r-1}`.
    pub fn build(
        slots: &[CoefficientSequence],
        divisor_slot: &CoefficientSequence,
        s: &[Complex64],
        b: Complex64,
        cap: usize,
    ) -> Result<Self> {
        if slots.is_empty() || slots.len() != s.len() {
            return Err(Error::InvalidInput(format!(
                "{} sequences for {} exponents",
                slots.len(),
                s.len()
            )));
        }
        let k = slots.len();
        let values_of = |a: &CoefficientSequence| -> Vec<Complex64> {
            (0..=cap as u64).map(|n| if n == 0 { Complex64::zero() } else { a.value(n) }).collect()
        };
        let slot_vals: Vec<Vec<Complex64>> = slots.iter().map(values_of).collect();
        let div_vals = values_of(divisor_slot);
        let nb: Vec<Complex64> = (0..=cap)
            .map(|n| if n == 0 { Complex64::zero() } else { real_pow(n as f64, b) * div_vals[n] })
            .collect();
        let pows: Vec<Vec<Complex64>> = s
            .iter()
            .map(|&sj| {
                (0..=cap)
                    .map(|m| if m == 0 { Complex64::zero() } else { real_pow(m as f64, -sj) })
                    .collect()
            })
            .collect();
        let divs: Vec<Vec<u64>> = (0..=cap as u64)
            .map(|n| if n == 0 { Vec::new() } else { divisors(n) })
            .collect();
        let mut values = vec![Complex64::zero(); cap + 1];
        let mut abs = vec![0.0; cap + 1];
        for total in k..=cap {
            let mut v = Complex64::zero();
            let mut a = 0.0;
            for_each_composition(total, k, &mut |ell: &[u64]| {
                let g = gcd_slice(ell);
                let mut conv = Complex64::zero();
                for &n in &divs[g as usize] {
                    let mut term = nb[n as usize];
                    for j in 0..k {
                        term *= slot_vals[j][(ell[j] / n) as usize];
                    }
                    conv += term;
                }
                let mut w = conv;
                for j in 0..k {
                    w *= pows[j][ell[j] as usize];
                }
                v += w;
                a += w.norm();
            });
            values[total] = v;
            abs[total] = a;
        }
        Ok(Self {
            labels: slots
                .iter()
                .chain(core::iter::once(divisor_slot))
                .map(|a| a.label().into())
                .collect(),
            b,
            values,
            abs,
        })
    }

    pub fn cap(&self) -> usize {
        self.values.len() - 1
    }

    /// `D(L)` for `1 <= L <= cap`.
    pub fn value(&self, total: usize) -> Complex64 {
        self.values[total]
    }

    /// `sum |conv(l)| / prod |l_j^{s_j}|` over the compositions of `L`.
    pub fn abs_value(&self, total: usize) -> f64 {
        self.abs[total]
    }

    /// Labels of `a_1, ..., a_r` and the exponent `b` the table was built for.
    pub fn key(&self) -> (&[alloc::string::String], Complex64) {
        (&self.labels, self.b)
    }
}
