//! Helpers shared by the integration targets.
#![allow(dead_code)]

use mtds_core::complex::real_pow;
use mtds_core::mt::{convolved_coefficient, mt_direct, mt_via_mb, mb_window, CoefficientSequence, MtPoint};
use num_complex::Complex64;

/// Two sides of `L_1(s - b) L_MT,2(s; a_2, a_3) = sum_m conv(m) m_1^{-s_1} m_2^{-s_2} (m_1+m_2)^{-s_3}`
/// with `s = s_1 + s_2 + s_3`, and a bound on their difference.
#[derive(Debug, Clone)]
pub struct ConvolutionCheck {
    /// `L_1(s-b)` times the direct double sum.
    pub product: Complex64,
    /// The convolved double sum over `m_1, m_2 <= cap`.
    pub convolved: Complex64,
    pub bound: f64,
}

impl ConvolutionCheck {
    pub fn gap(&self) -> f64 {
        (self.product - self.convolved).norm()
    }

    pub fn holds(&self) -> bool {
        self.gap() <= self.bound
    }
}

/// Largest `|sum_{n <= x} a(n)|` over one period, for periodic `a` with mean zero.
fn partial_sum_bound(a: &CoefficientSequence) -> Option<f64> {
    let chi = a.as_character()?;
    if chi.is_principal() {
        return None;
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let mut best = 0.0f64;
    for n in 1..=chi.modulus() {
        acc += chi.value(n);
        best = best.max(acc.norm());
    }
    Some(best)
}

/// The box sum `B(K)` over `m_1, m_2 <= K` of `L_MT,2` regroups the convolved
/// box sum as `sum_{n <= cap} a_1(n) n^{b-s} B(cap / n)`. Its distance to the
/// product is bounded through `D(K) = B(K) - L_MT,2`, either absolutely or by
/// partial summation when `a_1` is a nonprincipal character, plus the tail of
/// `L_1(s-b)` beyond `cap`.
pub fn convolution_identity(
    s: [Complex64; 3],
    a1: &CoefficientSequence,
    others: &[CoefficientSequence; 2],
    b: Complex64,
    cap: usize,
) -> ConvolutionCheck {
    let p = MtPoint::new(s.to_vec()).unwrap();
    let total = s[0] + s[1] + s[2];
    let (mt, trunc) = mt_direct(&p, others, 1e-12).unwrap();
    let t = trunc.tail_bound;
    let l1 = a1.l_eval(total - b).unwrap();

    let pw = |m: usize, e: Complex64| real_pow(m as f64, -e);
    let mut convolved = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    let mut boxed = vec![Complex64::new(0.0, 0.0); cap + 1];
    for m1 in 1..=cap {
        for m2 in 1..=cap {
            let w = pw(m1, s[0]) * pw(m2, s[1]) * pw(m1 + m2, s[2]);
            let conv = convolved_coefficient(b, a1, others, &[m1 as u64, m2 as u64]).unwrap();
            convolved += conv * w;
            scale += (conv * w).norm();
            boxed[m1.max(m2)] += others[0].value(m1 as u64) * others[1].value(m2 as u64) * w;
        }
    }
    for k in 1..=cap {
        let prev = boxed[k - 1];
        boxed[k] += prev;
    }

    let weight = |n: usize| real_pow(n as f64, b - total);
    let diff = |n: usize| boxed[cap / n] - mt;
    let slack: f64 = (1..=cap).map(|n| weight(n).norm() * t).sum();
    let absolute: f64 = (1..=cap)
        .map(|n| a1.value(n as u64).norm() * weight(n).norm() * diff(n).norm())
        .sum();
    let e = (total - b).re;
    let w = total - b;
    let (summed, tail) = match partial_sum_bound(a1) {
        Some(m) => {
            let g = |n: usize| weight(n) * diff(n);
            let variation: f64 = (1..cap).map(|n| (g(n) - g(n + 1)).norm()).sum();
            let abel = m * (g(cap).norm() + variation);
            let mut tail = m * (cap as f64 + 1.0).powf(-e) * (1.0 + w.norm() / e);
            if e > 1.0 {
                tail = tail.min((cap as f64).powf(1.0 - e) / (e - 1.0));
            }
            (absolute.min(abel), tail)
        }
        None => {
            assert!(e > 1.0, "divergent L_1 at {w}");
            (absolute, (cap as f64).powf(1.0 - e) / (e - 1.0))
        }
    };
    let product = l1 * mt;
    let rounding = 1e-13 * (scale + product.norm());
    ConvolutionCheck {
        product,
        convolved,
        bound: summed + slack + mt.norm() * tail + l1.norm() * t + rounding,
    }
}

/// Direct sum and contour integral at the middle of the admissible window.
pub fn dual_route(p: &MtPoint, coeffs: &[CoefficientSequence]) -> (Complex64, f64, Complex64, f64) {
    let (d, trunc) = mt_direct(p, coeffs, 1e-9).unwrap();
    let (lo, hi) = mb_window(p, coeffs).unwrap();
    let c = 0.5 * (lo + hi);
    let height = 40.0 + 2.0 * p.s().iter().map(|z| z.im.abs()).sum::<f64>();
    let mb = mt_via_mb(p, coeffs, c, height, 0.02).unwrap();
    (d, trunc.tail_bound, mb.value, mb.error)
}

pub fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}
