//! Points `(s_1, ..., s_r, s_{r+1})` and the absolute-convergence test.

use alloc::{format, vec::Vec};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest depth accepted by the evaluators.
pub const MAX_DEPTH: usize = 4;

/// A point of depth `r`: the exponents `s_1, ..., s_r` of the individual
/// variables followed by the exponent `s_{r+1}` of their sum.
#[derive(Debug, Clone, PartialEq)]
pub struct MtPoint {
    s: Vec<Complex64>,
}

impl MtPoint {
    pub fn new(s: Vec<Complex64>) -> Result<Self> {
        if s.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "a point needs at least two exponents, got {}",
                s.len()
            )));
        }
        if s.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidInput("non-finite exponent".into()));
        }
        Ok(Self { s })
    }

    /// Point with real exponents.
    pub fn real(s: &[f64]) -> Result<Self> {
        Self::new(s.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Depth `r`.
    pub fn depth(&self) -> usize {
        self.s.len() - 1
    }

    /// All `r + 1` exponents.
    pub fn s(&self) -> &[Complex64] {
        &self.s
    }

    /// `s_j`, one-based.
    pub fn get(&self, j: usize) -> Complex64 {
        self.s[j - 1]
    }

    /// `s_{r+1}`.
    pub fn top(&self) -> Complex64 {
        self.s[self.s.len() - 1]
    }

    /// `s_r`.
    pub fn last(&self) -> Complex64 {
        self.s[self.s.len() - 2]
    }

    /// `(s_1, ..., s_{r-1}, w)`: depth lowered by one with top exponent `w`.
    pub fn inner(&self, w: Complex64) -> Self {
        let r = self.depth();
        let mut s: Vec<Complex64> = self.s[..r - 1].to_vec();
        s.push(w);
        Self { s }
    }

    /// `s_1 + ... + s_{r+1}`.
    pub fn total(&self) -> Complex64 {
        self.s.iter().sum()
    }
}

/// Result of the subset test.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionCheck {
    pub inside: bool,
    /// One-based indices of the subset with the smallest slack.
    pub witness: Vec<usize>,
    /// `min over subsets of sum (sigma_k - alpha_k) + sigma_{r+1} - |subset|`.
    pub slack: f64,
}

/// Tests `sum_{k in J} (sigma_k - alpha_k) + sigma_{r+1} > |J|` for every
/// nonempty `J`.
pub fn in_convergence_region(p: &MtPoint, alphas: &[f64]) -> Result<RegionCheck> {
    let r = p.depth();
    if alphas.len() != r {
        return Err(Error::InvalidInput(format!(
            "{} growth exponents for depth {r}",
            alphas.len()
        )));
    }
    let shifted: Vec<f64> = (0..r).map(|k| p.s[k].re - alphas[k]).collect();
    let (slack, mask) = min_subset_slack(&shifted, p.top().re);
    let witness = (0..r).filter(|k| mask >> k & 1 == 1).map(|k| k + 1).collect();
    Ok(RegionCheck {
        inside: slack > 0.0,
        witness,
        slack,
    })
}

/// Smallest `sum_{k in J} x_k + top - |J|` with its subset mask; ties go to
/// the larger subset.
pub(crate) fn min_subset_slack(x: &[f64], top: f64) -> (f64, u32) {
    let r = x.len();
    let mut best = (f64::INFINITY, 0u32);
    for mask in 1u32..(1 << r) {
        let mut v = top;
        for (k, xk) in x.iter().enumerate() {
            if mask >> k & 1 == 1 {
                v += xk - 1.0;
            }
        }
        if v < best.0 || (v == best.0 && mask.count_ones() > best.1.count_ones()) {
            best = (v, mask);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn region_examples() {
        let p = MtPoint::real(&[3.0, -0.5, 4.0]).unwrap();
        let chk = in_convergence_region(&p, &[0.0, 0.0]).unwrap();
        assert!(chk.inside);
        assert!((chk.slack - 2.5).abs() < 1e-15);

        let p = MtPoint::real(&[1.0, 1.0, 0.0]).unwrap();
        let chk = in_convergence_region(&p, &[0.0, 0.0]).unwrap();
        assert!(!chk.inside);
        assert_eq!(chk.witness, alloc::vec![1, 2]);

        let p = MtPoint::real(&[3.0, 2.0, 2.0, 2.0]).unwrap();
        assert!(in_convergence_region(&p, &[1.0, 0.0, 0.0]).unwrap().inside);
    }

    #[test]
    fn region_rejects_wrong_alphas() {
        let p = MtPoint::real(&[3.0, 2.0, 2.0]).unwrap();
        assert!(in_convergence_region(&p, &[0.0]).is_err());
        assert!(MtPoint::real(&[1.0]).is_err());
        assert!(MtPoint::real(&[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn inner_point() {
        let p = MtPoint::real(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let q = p.inner(Complex64::new(7.0, 0.0));
        assert_eq!(q.depth(), 2);
        assert_eq!(q.s()[2].re, 7.0);
        assert_eq!(p.last().re, 3.0);
    }
}
