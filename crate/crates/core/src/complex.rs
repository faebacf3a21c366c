//! Complex scalar kernels: log-Gamma, Gamma ratios, Pochhammer symbols,
//! powers with an explicitly declared branch, and Bernoulli numbers.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
#[allow(unused_imports)]
use num_traits::{Float, One, Zero};

use crate::error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type ComplexScalar = Complex64;

pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
pub const LN_PI: f64 = 1.144_729_885_849_400_2;
pub const TWO_PI: f64 = 2.0 * PI;

/// Largest Bernoulli index served by [`bernoulli`].
pub const BERNOULLI_MAX: usize = 60;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `true` when every component is finite.
#[inline]
pub fn is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// `i^k` for integer `k`, exact.
pub fn i_pow(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => c(1.0, 0.0),
        1 => c(0.0, 1.0),
        2 => c(-1.0, 0.0),
        _ => c(0.0, -1.0),
    }
}

/// `e^{i pi w / 2}` computed as `exp(i pi w / 2)`; the principal value of `i^w`.
pub fn exp_i_half_pi(w: Complex64) -> Complex64 {
    (Complex64::i() * (PI / 2.0) * w).exp()
}

/// Non-positive integer test used for Gamma poles.
pub fn is_gamma_pole(z: Complex64) -> bool {
    if z.im.abs() > 1e-13 * (1.0 + z.re.abs()) || z.re > 0.5 {
        return false;
    }
    (z.re - z.re.round()).abs() <= 1e-13 * (1.0 + z.re.abs())
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn log_gamma_right(z: Complex64) -> Complex64 {
    let zm = z - 1.0;
    let mut a = real(LANCZOS[0]);
    for (k, &p) in LANCZOS.iter().enumerate().skip(1) {
        a += p / (zm + k as f64);
    }
    let t = zm + (LANCZOS_G + 0.5);
    real(LN_SQRT_2PI) + (zm + 0.5) * t.ln() - t + a.ln()
}

/// Principal branch of `log Gamma(z)`.
///
/// Lanczos approximation on `Re z >= 1/2`; to the left the recurrence
/// `log Gamma(z) = log Gamma(z + n) - sum log(z + k)` keeps the principal
/// branch (the one continuous from the positive real axis).
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !is_finite(z) {
        return Err(Error::InvalidInput(alloc::format!("non-finite argument {z}")));
    }
    if is_gamma_pole(z) {
        return Err(Error::GammaPole {
            role: "log_gamma",
            index: 0,
            z,
        });
    }
    if z.re >= 0.5 {
        return Ok(log_gamma_right(z));
    }
    let n = (0.5 - z.re).ceil() as usize;
    let mut shift = Complex64::zero();
    for k in 0..n {
        shift += (z + k as f64).ln();
    }
    Ok(log_gamma_right(z + n as f64) - shift)
}

/// `Gamma(z)`.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    Ok(log_gamma(z)?.exp())
}

/// `1 / Gamma(z)`, entire: zero at the poles of Gamma.
pub fn rgamma(z: Complex64) -> Complex64 {
    match log_gamma(z) {
        Ok(l) => (-l).exp(),
        Err(_) => Complex64::zero(),
    }
}

/// `prod Gamma(numerators) / prod Gamma(denominators)` through log-Gamma sums.
pub fn gamma_ratio(numerators: &[Complex64], denominators: &[Complex64]) -> Result<Complex64> {
    let mut acc = Complex64::zero();
    for (index, &z) in numerators.iter().enumerate() {
        if is_gamma_pole(z) {
            return Err(Error::GammaPole {
                role: "numerator",
                index,
                z,
            });
        }
        acc += log_gamma(z)?;
    }
    for (index, &z) in denominators.iter().enumerate() {
        if is_gamma_pole(z) {
            return Err(Error::GammaPole {
                role: "denominator",
                index,
                z,
            });
        }
        acc -= log_gamma(z)?;
    }
    Ok(acc.exp())
}

/// Rising factorial `(a)_k = a (a+1) ... (a+k-1)`.
pub fn pochhammer(a: Complex64, k: usize) -> Complex64 {
    let mut p = Complex64::one();
    for j in 0..k {
        p *= a + j as f64;
    }
    p
}

/// A complex base together with the argument used for its logarithm.
///
/// The declared argument may differ from the principal one by a multiple
/// of `2 pi`; powers are `exp(z (ln|value| + i declared_arg))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchedBase {
    pub value: Complex64,
    pub declared_arg: f64,
}

impl BranchedBase {
    /// Principal argument.
    pub fn principal(value: Complex64) -> Self {
        Self {
            value,
            declared_arg: value.arg(),
        }
    }

    /// Base with an explicit argument, checked against the value modulo `2 pi`.
    pub fn with_arg(value: Complex64, declared_arg: f64) -> Result<Self> {
        if value.is_zero() {
            return Err(Error::ZeroBase);
        }
        let d = (declared_arg - value.arg()) / TWO_PI;
        if (d - d.round()).abs() > 1e-9 {
            return Err(Error::InvalidInput(alloc::format!(
                "declared arg {declared_arg} inconsistent with {value}"
            )));
        }
        Ok(Self {
            value,
            declared_arg,
        })
    }

    /// `i * y` for real `y != 0`, with argument exactly `+-pi/2`.
    pub fn imaginary(y: f64) -> Self {
        Self {
            value: c(0.0, y),
            declared_arg: if y >= 0.0 { PI / 2.0 } else { -PI / 2.0 },
        }
    }

    /// `ln|value| + i declared_arg`.
    pub fn ln(&self) -> Complex64 {
        c(self.value.norm().ln(), self.declared_arg)
    }

    pub fn norm(&self) -> f64 {
        self.value.norm()
    }

    /// Same value, argument negated: conjugate base.
    pub fn conj(&self) -> Self {
        Self {
            value: self.value.conj(),
            declared_arg: -self.declared_arg,
        }
    }

    /// Multiply by a positive real, keeping the branch.
    pub fn scale(&self, factor: f64) -> Self {
        debug_assert!(factor > 0.0);
        Self {
            value: self.value * factor,
            declared_arg: self.declared_arg,
        }
    }
}

/// `base^z = exp(z (ln|base| + i declared_arg))`.
pub fn principal_power(base: &BranchedBase, z: Complex64) -> Result<Complex64> {
    if base.value.is_zero() {
        return Err(Error::ZeroBase);
    }
    Ok((z * base.ln()).exp())
}

/// `x^s` for real `x > 0`.
#[inline]
pub fn real_pow(x: f64, s: Complex64) -> Complex64 {
    (s * x.ln()).exp()
}

/// Parses `a`, `bi`, `a+bi` or `a-bi` (also with `j`), e.g. `-0.5+14.13i`.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let t: alloc::string::String = text.chars().filter(|ch| !ch.is_whitespace()).collect();
    let bad = || Error::InvalidInput(alloc::format!("cannot parse complex number {text:?}"));
    let num = |u: &str| -> Result<f64> {
        match u {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => u.parse::<f64>().map_err(|_| bad()),
        }
    };
    let z = match t.strip_suffix('i').or_else(|| t.strip_suffix('j')) {
        None => real(t.parse::<f64>().map_err(|_| bad())?),
        Some(body) => {
            let bytes = body.as_bytes();
            let split = (1..bytes.len()).rev().find(|&k| {
                matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E')
            });
            match split {
                Some(k) => c(num(&body[..k])?, num(&body[k..])?),
                None => c(0.0, num(body)?),
            }
        }
    };
    if is_finite(z) {
        Ok(z)
    } else {
        Err(bad())
    }
}

/// `(e^w - 1) / w`, accurate near zero.
pub fn exprel(w: Complex64) -> Complex64 {
    if w.norm() < 0.25 {
        let mut term = Complex64::one();
        let mut sum = Complex64::one();
        for k in 2..30 {
            term *= w / k as f64;
            sum += term;
            if term.norm() < 1e-18 * sum.norm() {
                break;
            }
        }
        sum
    } else {
        (w.exp() - 1.0) / w
    }
}

/// Bernoulli number `B_n` as an exact rational (`B_1 = -1/2`).
///
/// Built from the recurrence `sum_{k=0}^{n} C(n+1, k) B_k = 0`.
pub fn bernoulli(n: usize) -> Result<BigRational> {
    if n > BERNOULLI_MAX {
        return Err(Error::OutOfRange {
            what: "Bernoulli index",
            value: n,
            max: BERNOULLI_MAX,
        });
    }
    Ok(bernoulli_table(n).pop().unwrap())
}

/// `B_0, ..., B_n`.
pub fn bernoulli_table(n: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(n + 1);
    b.push(BigRational::one());
    for m in 1..=n {
        // binomial C(m+1, k) built incrementally
        let mut binom = BigInt::one();
        let mut acc = BigRational::zero();
        for (k, bk) in b.iter().enumerate() {
            acc += BigRational::from_integer(binom.clone()) * bk;
            binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
        }
        // binom is now C(m+1, m)
        b.push(-acc / BigRational::from_integer(binom));
    }
    b
}

/// `B_{2k} / (2k)!` for `k = 1..=15`, the Euler-Maclaurin weights.
pub(crate) const EM_WEIGHTS: [f64; 15] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
    1.0 / 74_724_249_600.0,
    -3_617.0 / 10_670_622_842_880_000.0,
    43_867.0 / 5_109_094_217_170_944_000.0,
    -174_611.0 / 802_857_662_698_291_200_000.0,
    77_683.0 / 14_101_100_039_391_805_440_000.0,
    -236_364_091.0 / 1_693_824_136_731_743_669_452_800_000.0,
    657_931.0 / 186_134_520_519_971_831_808_000_000.0,
    -3_392_780_147.0 / 37_893_265_687_455_865_519_472_640_000_000.0,
    1_723_168_255_201.0 / 759_790_291_646_040_068_357_842_010_112_000_000.0,
];

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn parse_complex_forms() {
        let cases = [
            ("3", c(3.0, 0.0)),
            ("-0.5", c(-0.5, 0.0)),
            ("2i", c(0.0, 2.0)),
            ("-i", c(0.0, -1.0)),
            ("1+2i", c(1.0, 2.0)),
            ("1.5e-3-2e2j", c(1.5e-3, -200.0)),
            ("-1e+2 + 3i", c(-100.0, 3.0)),
        ];
        for (t, z) in cases {
            assert_eq!(parse_complex(t).unwrap(), z, "{t}");
        }
        for t in ["", "abc", "1+", "nan", "1+2k"] {
            assert!(parse_complex(t).is_err(), "{t}");
        }
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    /// Stirling series with 30 correction terms, used far from the origin
    /// and shifted by the recurrence. Independent of the Lanczos path.
    fn stirling_oracle(z: Complex64) -> Complex64 {
        let b = bernoulli_table(60);
        let shift = 40usize;
        let w = z + shift as f64;
        let mut s = (w - 0.5) * w.ln() - w + LN_SQRT_2PI;
        let mut wp = w;
        let w2 = w * w;
        for k in 1..=30 {
            let b2k = b[2 * k].to_f64().unwrap();
            s += b2k / ((2 * k) as f64 * (2 * k - 1) as f64) / wp;
            wp *= w2;
        }
        for k in 0..shift {
            s -= (z + k as f64).ln();
        }
        s
    }

    #[test]
    fn log_gamma_classical_values() {
        assert!(log_gamma(real(1.0)).unwrap().norm() < 1e-15);
        let half = log_gamma(real(0.5)).unwrap();
        assert!((half.re - 0.572_364_942_924_700_1).abs() < 1e-14);
        assert!(half.im.abs() < 1e-15);
        let z = c(4.0, 3.0);
        let got = log_gamma(z).unwrap();
        let want = stirling_oracle(z);
        assert!((got - want).norm() < 1e-13, "{got} vs {want}");
    }

    #[test]
    fn log_gamma_poles_rejected() {
        for k in 0..5 {
            assert!(matches!(
                log_gamma(real(-(k as f64))),
                Err(Error::GammaPole { .. })
            ));
        }
    }

    #[test]
    fn log_gamma_matches_stirling_on_wide_range() {
        for &(x, y) in &[
            (0.3, 0.0),
            (-2.5, 0.7),
            (12.0, -40.0),
            (0.5, 300.0),
            (-7.3, -2.0),
            (2.0, 900.0),
        ] {
            let z = c(x, y);
            let got = log_gamma(z).unwrap().exp();
            let want = stirling_oracle(z).exp();
            assert!(rel(got, want) < 1e-12, "z = {z}: {got} vs {want}");
        }
    }

    #[test]
    fn gamma_ratio_examples() {
        assert!(rel(gamma_ratio(&[real(3.0)], &[real(2.0)]).unwrap(), real(2.0)) < 1e-14);
        assert!(
            rel(
                gamma_ratio(&[real(0.5), real(0.5)], &[real(1.0)]).unwrap(),
                real(PI)
            ) < 1e-14
        );
        let (sr, sr1) = (real(-0.5), real(4.0));
        let got = gamma_ratio(&[1.0 - sr, sr + sr1 - 1.0], &[sr1]).unwrap();
        let want = gamma(1.0 - sr).unwrap() * gamma(sr + sr1 - 1.0).unwrap() / gamma(sr1).unwrap();
        assert!(rel(got, want) < 1e-14);
        // Gamma(1.5) Gamma(2.5) / Gamma(4) = (sqrt(pi)/2)(3 sqrt(pi)/4)/6
        assert!(rel(got, real(PI / 16.0)) < 1e-14);
        let err = gamma_ratio(&[real(1.0)], &[real(-3.0)]).unwrap_err();
        assert!(matches!(
            err,
            Error::GammaPole {
                role: "denominator",
                index: 0,
                ..
            }
        ));
    }

    #[test]
    fn gamma_ratio_large_imaginary_parts_do_not_overflow() {
        let z = c(0.5, 1000.0);
        let r = gamma_ratio(&[z], &[z + 1.0]).unwrap();
        assert!(rel(r, 1.0 / z) < 1e-12);
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(real(2.0), 3), real(24.0));
        assert_eq!(pochhammer(real(-1.0), 3), Complex64::zero());
        let a = c(0.5, 1.0);
        let via_gamma = gamma_ratio(&[a + 5.0], &[a]).unwrap();
        assert!(rel(pochhammer(a, 5), via_gamma) < 1e-13);
    }

    #[test]
    fn principal_power_examples() {
        let b = BranchedBase::imaginary(TWO_PI);
        let v = principal_power(&b, real(2.0)).unwrap();
        assert!((v - real(-4.0 * PI * PI)).norm() < 1e-12);
        let bm = BranchedBase::imaginary(-TWO_PI);
        let v = principal_power(&bm, real(1.0)).unwrap();
        assert!((v - c(0.0, -TWO_PI)).norm() < 1e-13);
        let b3 = BranchedBase::imaginary(3.0 * TWO_PI);
        let z = c(-0.5, 2.0);
        let log_hand = c((3.0 * TWO_PI).ln(), PI / 2.0);
        let want = (z * log_hand).exp();
        assert!(rel(principal_power(&b3, z).unwrap(), want) < 1e-14);
        assert_eq!(principal_power(&BranchedBase::principal(real(0.0)), z), Err(Error::ZeroBase));
    }

    #[test]
    fn branched_base_rejects_inconsistent_arg() {
        assert!(BranchedBase::with_arg(c(0.0, 1.0), PI / 2.0 + TWO_PI).is_ok());
        assert!(BranchedBase::with_arg(c(0.0, 1.0), 0.3).is_err());
    }

    #[test]
    fn bernoulli_examples() {
        let b = |n| bernoulli(n).unwrap();
        assert_eq!(b(0), BigRational::one());
        assert_eq!(b(1), BigRational::new((-1).into(), 2.into()));
        assert_eq!(b(2), BigRational::new(1.into(), 6.into()));
        assert_eq!(b(12), BigRational::new((-691).into(), 2730.into()));
        assert!(b(13).is_zero());
        assert!(matches!(bernoulli(61), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn bernoulli_recurrence_oracle() {
        // independent check: sum_k C(n+1,k) B_k = 0 with a fresh binomial table
        let table = bernoulli_table(30);
        for n in 1..=30usize {
            let mut acc = BigRational::zero();
            for (k, bk) in table.iter().enumerate().take(n + 1) {
                let mut binom = BigInt::one();
                for j in 0..k {
                    binom = binom * BigInt::from(n + 1 - j) / BigInt::from(j + 1);
                }
                acc += BigRational::from_integer(binom) * bk;
            }
            assert!(acc.is_zero(), "n = {n}");
        }
    }

    #[test]
    fn em_weights_match_exact_bernoulli() {
        let table = bernoulli_table(30);
        let mut fact = 1.0f64;
        for k in 1..=15usize {
            fact *= ((2 * k - 1) * (2 * k)) as f64;
            let exact = table[2 * k].to_f64().unwrap() / fact;
            assert!((EM_WEIGHTS[k - 1] - exact).abs() <= 1e-14 * exact.abs(), "k = {k}");
        }
    }

    #[test]
    fn exprel_small_and_large() {
        assert!((exprel(real(1e-10)) - real(1.0 + 5e-11)).norm() < 1e-16);
        let w = c(1.0, 2.0);
        assert!(rel(exprel(w), (w.exp() - 1.0) / w) < 1e-15);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn away_from_poles(z: Complex64) -> bool {
            z.re > 0.1 || (z.re - z.re.round()).abs() > 0.1 || z.im.abs() > 0.1
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(1000))]

            #[test]
            fn recurrence(x in -14.0f64..14.0, y in -14.0f64..14.0) {
                let z = c(x, y);
                prop_assume!(z.norm() <= 20.0 && away_from_poles(z) && away_from_poles(z + 1.0));
                let lhs = log_gamma(z + 1.0).unwrap().exp();
                let rhs = z * log_gamma(z).unwrap().exp();
                prop_assert!(rel(lhs, rhs) < 1e-12);
            }

            #[test]
            fn reflection(x in -14.0f64..14.0, y in -14.0f64..14.0) {
                let z = c(x, y);
                prop_assume!(z.norm() <= 20.0 && away_from_poles(z) && away_from_poles(1.0 - z));
                let lhs = log_gamma(z).unwrap().exp() * log_gamma(1.0 - z).unwrap().exp();
                let rhs = real(PI) / (z * PI).sin();
                prop_assert!(rel(lhs, rhs) < 1e-10);
            }

            #[test]
            fn power_is_additive_in_exponent(
                bx in -5.0f64..5.0, by in -5.0f64..5.0,
                a in -3.0f64..3.0, b in -3.0f64..3.0, cc in -3.0f64..3.0, d in -3.0f64..3.0,
            ) {
                let base = BranchedBase::principal(c(bx, by));
                prop_assume!(base.norm() > 1e-3);
                let (z1, z2) = (c(a, b), c(cc, d));
                let lhs = principal_power(&base, z1 + z2).unwrap();
                let rhs = principal_power(&base, z1).unwrap() * principal_power(&base, z2).unwrap();
                prop_assert!(rel(lhs, rhs) < 1e-12);
            }

            #[test]
            fn pochhammer_splits(x in -5.0f64..5.0, y in -5.0f64..5.0, j in 0usize..8, k in 0usize..8) {
                let a = c(x, y);
                let lhs = pochhammer(a, j + k);
                let rhs = pochhammer(a, j) * pochhammer(a + j as f64, k);
                prop_assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
            }
        }
    }
}
