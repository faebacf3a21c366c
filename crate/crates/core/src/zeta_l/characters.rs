//! The group of Dirichlet characters modulo `q`, Gauss sums and root numbers.
//!
//! Characters are labelled by `(q, index)`. The index is the mixed-radix
//! encoding of the exponent tuple `(j_1, ..., j_m)` over the cyclic factors
//! of `(Z/qZ)^x`, first factor most significant. Factors come from the
//! prime-power decomposition of `q` in increasing prime order; an odd prime
//! power contributes one factor generated by its smallest primitive root,
//! `2^e` contributes `<-1>` (for `e >= 2`) followed by `<5>` (for `e >= 3`).
//! Index 0 is always the principal character.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::arith::{factorize, gcd, lcm, primitive_root_prime_power};
use crate::complex::{c, i_pow};
use crate::error::{Error, Result};

/// `e^{2 pi i k / n}` with exact values at multiples of a quarter turn.
pub fn root_of_unity(k: u64, n: u64) -> Complex64 {
    let k = k % n;
    if (4 * k).is_multiple_of(n) {
        return i_pow((4 * k / n) as i64);
    }
    let theta = 2.0 * PI * k as f64 / n as f64;
    c(theta.cos(), theta.sin())
}

#[derive(Debug, Clone)]
struct CyclicFactor {
    /// prime power this factor lives in
    modulus: u64,
    order: u64,
    /// discrete log of each residue mod `modulus` (None when not a unit)
    log: Vec<Option<u64>>,
}

#[derive(Debug, Clone)]
struct GroupStructure {
    q: u64,
    factors: Vec<CyclicFactor>,
}

impl GroupStructure {
    fn new(q: u64) -> Self {
        let mut factors = Vec::new();
        for (p, e) in factorize(q) {
            let pe = p.pow(e);
            if p == 2 {
                if e >= 2 {
                    let mut log = alloc::vec![None; pe as usize];
                    for a in (1..pe).step_by(2) {
                        log[a as usize] = Some(if a % 4 == 1 { 0 } else { 1 });
                    }
                    factors.push(CyclicFactor {
                        modulus: pe,
                        order: 2,
                        log,
                    });
                }
                if e >= 3 {
                    let order = pe / 4;
                    let mut log = alloc::vec![None; pe as usize];
                    let mut x = 1u64;
                    for k in 0..order {
                        log[x as usize] = Some(k);
                        log[(pe - x) as usize] = Some(k);
                        x = x * 5 % pe;
                    }
                    factors.push(CyclicFactor {
                        modulus: pe,
                        order,
                        log,
                    });
                }
            } else {
                let g = primitive_root_prime_power(p, e);
                let order = pe / p * (p - 1);
                let mut log = alloc::vec![None; pe as usize];
                let mut x = 1u64;
                for k in 0..order {
                    log[x as usize] = Some(k);
                    x = x * g % pe;
                }
                factors.push(CyclicFactor {
                    modulus: pe,
                    order,
                    log,
                });
            }
        }
        Self { q, factors }
    }

    fn size(&self) -> usize {
        self.factors.iter().map(|f| f.order as usize).product()
    }

    fn exponent(&self) -> u64 {
        self.factors.iter().fold(1, |acc, f| lcm(acc, f.order))
    }

    fn digits(&self, mut index: usize) -> Vec<u64> {
        let mut d = alloc::vec![0u64; self.factors.len()];
        for (slot, f) in d.iter_mut().zip(self.factors.iter()).rev() {
            *slot = index as u64 % f.order;
            index /= f.order as usize;
        }
        d
    }

    fn index_of(&self, digits: &[u64]) -> usize {
        digits
            .iter()
            .zip(self.factors.iter())
            .fold(0usize, |acc, (&j, f)| acc * f.order as usize + j as usize)
    }
}

/// A Dirichlet character modulo `q` with its value table.
#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    modulus: u64,
    index: usize,
    /// values are `e^{2 pi i exps[a] / exponent}`
    exponent: u64,
    exps: Vec<Option<u64>>,
    values: Vec<Complex64>,
    digits: Vec<u64>,
    primitive: bool,
    parity: u8,
    principal: bool,
    order: u64,
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.modulus == other.modulus && self.index == other.index
    }
}

impl DirichletCharacter {
    fn build(group: &GroupStructure, index: usize) -> Self {
        let q = group.q;
        let exponent = group.exponent();
        let digits = group.digits(index);
        let mut exps = alloc::vec![None; q as usize];
        for a in 0..q {
            if gcd(a, q) != 1 {
                continue;
            }
            let mut e = 0u64;
            for (f, &j) in group.factors.iter().zip(digits.iter()) {
                let k = f.log[(a % f.modulus) as usize].expect("unit has a discrete log");
                e = (e + j * k % f.order * (exponent / f.order)) % exponent;
            }
            exps[a as usize] = Some(e);
        }
        if q == 1 {
            exps[0] = Some(0);
        }
        let values = exps
            .iter()
            .map(|e| match e {
                Some(e) => root_of_unity(*e, exponent),
                None => Complex64::new(0.0, 0.0),
            })
            .collect();
        let order = digits
            .iter()
            .zip(group.factors.iter())
            .fold(1u64, |acc, (&j, f)| lcm(acc, f.order / gcd(j, f.order)));
        let principal = digits.iter().all(|&j| j == 0);
        let minus_one = if q == 1 { 0 } else { q - 1 };
        let parity = match exps[minus_one as usize] {
            Some(0) | None => 0,
            Some(_) => 1,
        };
        let mut chi = Self {
            modulus: q,
            index,
            exponent,
            exps,
            values,
            digits,
            primitive: false,
            parity,
            principal,
            order,
        };
        chi.primitive = chi.compute_primitive();
        chi
    }

    fn compute_primitive(&self) -> bool {
        let q = self.modulus;
        if q == 1 {
            return true;
        }
        factorize(q).iter().all(|&(p, _)| {
            let d = q / p;
            (1..q).any(|a| a % d == 1 % d && gcd(a, q) == 1 && self.exps[a as usize] != Some(0))
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Position in the canonical enumeration of [`characters_mod`].
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn is_primitive(&self) -> bool {
        self.primitive
    }

    pub fn is_principal(&self) -> bool {
        self.principal
    }

    /// `0` for even characters, `1` for odd ones.
    pub fn parity(&self) -> u8 {
        self.parity
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// `chi(n)` for any integer `n >= 0`.
    pub fn value(&self, n: u64) -> Complex64 {
        self.values[(n % self.modulus) as usize]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Exponent `e` with `chi(a) = e^{2 pi i e / exponent}`; `None` off the units.
    pub fn log_value(&self, a: u64) -> Option<u64> {
        self.exps[(a % self.modulus) as usize]
    }

    /// Exponent of `(Z/qZ)^x`, the common denominator of [`Self::log_value`].
    pub fn group_exponent(&self) -> u64 {
        self.exponent
    }

    /// The complex-conjugate character, with its own canonical index.
    pub fn conj(&self) -> Self {
        let group = GroupStructure::new(self.modulus);
        let digits: Vec<u64> = self
            .digits
            .iter()
            .zip(group.factors.iter())
            .map(|(&j, f)| (f.order - j) % f.order)
            .collect();
        Self::build(&group, group.index_of(&digits))
    }
}

/// All `phi(q)` characters modulo `q` in canonical order.
pub fn characters_mod(q: u64) -> Result<Vec<DirichletCharacter>> {
    if q == 0 {
        return Err(Error::InvalidInput("modulus must be positive".into()));
    }
    let group = GroupStructure::new(q);
    Ok((0..group.size())
        .map(|i| DirichletCharacter::build(&group, i))
        .collect())
}

/// The character with label `(q, index)`.
pub fn character(q: u64, index: usize) -> Result<DirichletCharacter> {
    if q == 0 {
        return Err(Error::InvalidInput("modulus must be positive".into()));
    }
    let group = GroupStructure::new(q);
    if index >= group.size() {
        return Err(Error::OutOfRange {
            what: "character index",
            value: index,
            max: group.size() - 1,
        });
    }
    Ok(DirichletCharacter::build(&group, index))
}

/// Gauss sum and root number of a character.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootNumber {
    pub tau: Complex64,
    pub epsilon: Complex64,
}

/// `tau(chi) = sum_{a=1}^{q} chi(a) e^{2 pi i a / q}` by the defining sum and
/// `epsilon = tau / (i^kappa sqrt(q))`.
pub fn gauss_sum(chi: &DirichletCharacter) -> RootNumber {
    let q = chi.modulus();
    let mut tau = Complex64::new(0.0, 0.0);
    for a in 1..=q {
        tau += chi.value(a) * root_of_unity(a, q);
    }
    let epsilon = tau / (i_pow(chi.parity() as i64) * (q as f64).sqrt());
    RootNumber { tau, epsilon }
}
