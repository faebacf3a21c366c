//! Coefficient sequences `a(n)` with declared growth and their Dirichlet
//! series.

use alloc::{format, string::String, vec::Vec};
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::{Float, One, Zero};

use crate::arith::euler_phi;
use crate::complex::{parse_complex, real, real_pow};
use crate::error::{Error, Result};
use crate::zeta_l::{character, dirichlet_l, riemann_zeta, DirichletCharacter};

/// Simple pole of a Dirichlet series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole {
    pub location: Complex64,
    pub order: u32,
    pub residue: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Ones,
    Character(DirichletCharacter),
    Monomial(f64),
    Finite(Vec<Complex64>),
    Linear(Vec<(Complex64, CoefficientSequence)>),
}

/// A sequence `a(n)`, `n >= 1`, with `|a(n)| <= C n^alpha` for the declared
/// `alpha` and bound constant `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSequence {
    label: String,
    kind: Kind,
}

impl CoefficientSequence {
    pub fn ones() -> Self {
        Self {
            label: "ones".into(),
            kind: Kind::Ones,
        }
    }

    /// Character number `index` modulo `q` in the ordering of
    /// [`characters_mod`](crate::zeta_l::characters_mod).
    pub fn character(q: u64, index: usize) -> Result<Self> {
        Ok(Self::from_character(character(q, index)?))
    }

    pub fn from_character(chi: DirichletCharacter) -> Self {
        Self {
            label: format!("char:{}:{}", chi.modulus(), chi.index()),
            kind: Kind::Character(chi),
        }
    }

    /// `a(n) = n^beta`.
    pub fn monomial(beta: f64) -> Result<Self> {
        if !beta.is_finite() {
            return Err(Error::InvalidInput(format!("monomial exponent {beta}")));
        }
        Ok(Self {
            label: format!("monomial:{beta}"),
            kind: Kind::Monomial(beta),
        })
    }

    /// `a(n) = values[n-1]` for `n <= values.len()`, zero afterwards.
    pub fn finite(values: Vec<Complex64>) -> Result<Self> {
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        let body: Vec<String> = values.iter().map(|&v| format_complex(v)).collect();
        Ok(Self {
            label: format!("finite:[{}]", body.join(",")),
            kind: Kind::Finite(values),
        })
    }

    /// `sum_i w_i a_i(n)`.
    pub fn linear(terms: Vec<(Complex64, CoefficientSequence)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidInput("empty linear combination".into()));
        }
        let body: Vec<String> = terms
            .iter()
            .map(|(w, a)| format!("({})*{}", format_complex(*w), a.label))
            .collect();
        Ok(Self {
            label: format!("lin[{}]", body.join("+")),
            kind: Kind::Linear(terms),
        })
    }

    /// Parses `ones`, `char:q:index`, `monomial:beta` or `finite:[c1,...]`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        let bad = |why: &str| Error::InvalidInput(format!("coefficient {text:?}: {why}"));
        if t == "ones" {
            return Ok(Self::ones());
        }
        if let Some(rest) = t.strip_prefix("char:") {
            let (q, index) = rest.split_once(':').ok_or_else(|| bad("expected char:q:index"))?;
            let q: u64 = q.parse().map_err(|_| bad("modulus"))?;
            let index: usize = index.parse().map_err(|_| bad("index"))?;
            if q == 0 {
                return Err(bad("modulus must be positive"));
            }
            return Self::character(q, index);
        }
        if let Some(rest) = t.strip_prefix("monomial:") {
            let beta: f64 = rest.parse().map_err(|_| bad("exponent"))?;
            return Self::monomial(beta);
        }
        if let Some(rest) = t.strip_prefix("finite:") {
            let inner = rest
                .strip_prefix('[')
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| bad("expected finite:[c1,...]"))?;
            let values = inner
                .split(',')
                .filter(|p| !p.trim().is_empty())
                .map(parse_complex)
                .collect::<Result<Vec<_>>>()?;
            if values.is_empty() {
                return Err(bad("no values"));
            }
            return Self::finite(values);
        }
        Err(bad("unknown kind"))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn value(&self, n: u64) -> Complex64 {
        match &self.kind {
            Kind::Ones => Complex64::one(),
            Kind::Character(chi) => chi.value(n),
            Kind::Monomial(beta) => real((n as f64).powf(*beta)),
            Kind::Finite(v) => v.get(n as usize - 1).copied().unwrap_or_else(Complex64::zero),
            Kind::Linear(terms) => terms.iter().map(|(w, a)| *w * a.value(n)).sum(),
        }
    }

    /// Declared growth exponent.
    pub fn alpha(&self) -> f64 {
        match &self.kind {
            Kind::Monomial(beta) => beta.max(0.0),
            Kind::Linear(terms) => terms.iter().map(|(_, a)| a.alpha()).fold(0.0, f64::max),
            _ => 0.0,
        }
    }

    /// `C` with `|a(n)| <= C n^alpha` for all `n`.
    pub fn bound_constant(&self) -> f64 {
        match &self.kind {
            Kind::Finite(v) => v.iter().map(|z| z.norm()).fold(0.0, f64::max),
            Kind::Linear(terms) => terms.iter().map(|(w, a)| w.norm() * a.bound_constant()).sum(),
            _ => 1.0,
        }
    }

    /// `sum a(n) n^{-s}`, continued.
    pub fn l_eval(&self, s: Complex64) -> Result<Complex64> {
        match &self.kind {
            Kind::Ones => riemann_zeta(s),
            Kind::Character(chi) => dirichlet_l(s, chi),
            Kind::Monomial(beta) => riemann_zeta(s - beta),
            Kind::Finite(v) => Ok(v
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| *c * real_pow(k as f64 + 1.0, -s))
                .sum()),
            Kind::Linear(terms) => {
                let mut acc = Complex64::zero();
                for (w, a) in terms {
                    acc += *w * a.l_eval(s)?;
                }
                Ok(acc)
            }
        }
    }

    /// Poles of the continued Dirichlet series, all simple.
    pub fn poles(&self) -> Vec<Pole> {
        let simple = |location: Complex64, residue: Complex64| Pole {
            location,
            order: 1,
            residue,
        };
        match &self.kind {
            Kind::Ones => alloc::vec![simple(real(1.0), real(1.0))],
            Kind::Character(chi) if chi.is_principal() => {
                let q = chi.modulus();
                alloc::vec![simple(real(1.0), real(euler_phi(q) as f64 / q as f64))]
            }
            Kind::Character(_) | Kind::Finite(_) => Vec::new(),
            Kind::Monomial(beta) => alloc::vec![simple(real(1.0 + beta), real(1.0))],
            Kind::Linear(terms) => {
                let mut out: Vec<Pole> = Vec::new();
                for (w, a) in terms {
                    for p in a.poles() {
                        let r = *w * p.residue;
                        match out.iter_mut().find(|q| (q.location - p.location).norm() < 1e-12) {
                            Some(q) => q.residue += r,
                            None => out.push(simple(p.location, r)),
                        }
                    }
                }
                out.retain(|p| p.residue.norm() > 1e-300);
                out
            }
        }
    }

    /// `conj(a(n))`.
    pub fn conj(&self) -> Self {
        match &self.kind {
            Kind::Character(chi) => Self::from_character(chi.conj()),
            Kind::Finite(v) => {
                Self::finite(v.iter().map(|z| z.conj()).collect()).expect("finite values")
            }
            Kind::Linear(terms) => Self::linear(
                terms.iter().map(|(w, a)| (w.conj(), a.conj())).collect(),
            )
            .expect("nonempty"),
            _ => self.clone(),
        }
    }

    /// Whether every `a(n)` is real.
    pub fn is_real(&self) -> bool {
        match &self.kind {
            Kind::Character(chi) => chi.order() <= 2,
            Kind::Finite(v) => v.iter().all(|z| z.im == 0.0),
            Kind::Linear(terms) => terms.iter().all(|(w, a)| w.im == 0.0 && a.is_real()),
            _ => true,
        }
    }

    pub fn is_ones(&self) -> bool {
        match &self.kind {
            Kind::Ones => true,
            Kind::Character(chi) => chi.modulus() == 1,
            _ => false,
        }
    }

    /// Underlying character, when the sequence is one.
    pub fn as_character(&self) -> Option<&DirichletCharacter> {
        match &self.kind {
            Kind::Character(chi) => Some(chi),
            _ => None,
        }
    }

    /// Same sequence multiplied by `w`.
    pub fn scaled(&self, w: Complex64) -> Self {
        Self::linear(alloc::vec![(w, self.clone())]).expect("nonempty")
    }
}

impl FromStr for CoefficientSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl fmt::Display for CoefficientSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.re == 0.0 {
        format!("{}i", z.im)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}
