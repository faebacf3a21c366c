//! Hyperplanes that may carry poles when some coefficient slots are
//! principal characters: `sum_{a<=h} s_{j_a} + s_{r+1} = h - l (1 - [h/r])`
//! for `1 <= h <= k`, `j_1 < ... < j_h` among the `k` principal slots and
//! `l >= 0`.

use alloc::{format, vec::Vec};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::mt::{CoefficientSequence, MtPoint};

/// Default half-width of the excluded band.
pub const DEFAULT_BAND: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct SingularLocusSpec {
    pub r: usize,
    /// One-based slots holding `ones` or a principal character.
    pub principal_indices: Vec<usize>,
    /// Distance to a hyperplane, measured in its linear form, below which a
    /// point counts as singular.
    pub band: f64,
}

impl SingularLocusSpec {
    pub fn new(r: usize, principal_indices: Vec<usize>, band: f64) -> Result<Self> {
        if !(band > 0.0) {
            return Err(Error::InvalidInput(format!("band must be positive, got {band}")));
        }
        if let Some(&j) = principal_indices.iter().find(|&&j| j == 0 || j > r) {
            return Err(Error::InvalidInput(format!("slot {j} outside 1..={r}")));
        }
        let mut principal_indices = principal_indices;
        principal_indices.sort_unstable();
        principal_indices.dedup();
        Ok(Self {
            r,
            principal_indices,
            band,
        })
    }

    /// Principal slots read off the coefficient sequences.
    pub fn from_coeffs(coeffs: &[CoefficientSequence], band: f64) -> Result<Self> {
        let idx = coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| a.is_ones() || a.as_character().is_some_and(|c| c.is_principal()))
            .map(|(j, _)| j + 1)
            .collect();
        Self::new(coeffs.len(), idx, band)
    }
}

/// The hyperplane a point was found on.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperplaneWitness {
    /// One-based slots `j_1 < ... < j_h`.
    pub subset: Vec<usize>,
    pub h: usize,
    pub l: u64,
    /// Right-hand side `h - l (1 - [h/r])`.
    pub target: f64,
    /// `|sum s_j + s_{r+1} - target|`.
    pub distance: f64,
}

impl core::fmt::Display for HyperplaneWitness {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let lhs: Vec<_> = self.subset.iter().map(|j| format!("s{j}")).collect();
        write!(f, "{} + s_top = {} (h = {}, l = {})", lhs.join(" + "), self.target, self.h, self.l)
    }
}

/// Closest hyperplane within the band, if any.
pub fn singular_locus(spec: &SingularLocusSpec, p: &MtPoint) -> Option<HyperplaneWitness> {
    let r = spec.r;
    if p.depth() != r {
        return None;
    }
    let k = spec.principal_indices.len();
    let mut best: Option<HyperplaneWitness> = None;
    for mask in 1u32..(1u32 << k) {
        let subset: Vec<usize> = (0..k)
            .filter(|b| mask & (1 << b) != 0)
            .map(|b| spec.principal_indices[b])
            .collect();
        let h = subset.len();
        let form: Complex64 = subset.iter().map(|&j| p.get(j)).sum::<Complex64>() + p.top();
        let full = h / r == 1;
        let l = if full {
            0
        } else {
            (h as f64 - form.re).round().max(0.0) as u64
        };
        let target = h as f64 - l as f64;
        let distance = (form - target).norm();
        if distance <= spec.band && best.as_ref().is_none_or(|b| distance < b.distance) {
            best = Some(HyperplaneWitness {
                subset,
                h,
                l,
                target,
                distance,
            });
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn both(r: usize) -> SingularLocusSpec {
        SingularLocusSpec::new(r, (1..=r).collect(), DEFAULT_BAND).unwrap()
    }

    #[test]
    fn single_slot_hyperplane() {
        let w = singular_locus(&both(2), &MtPoint::real(&[0.5, 0.5, 0.5]).unwrap()).unwrap();
        assert_eq!((w.h, w.l, w.target), (1, 0, 1.0));
        assert_eq!(w.subset.len(), 1);
    }

    #[test]
    fn full_subset_kills_shift() {
        let w = singular_locus(&both(2), &MtPoint::real(&[0.7, 0.9, 0.4]).unwrap()).unwrap();
        assert_eq!((w.h, w.subset.clone(), w.target), (2, vec![1, 2], 2.0));
        // s1 + s2 + s3 = 0 is not singular: the shift only applies for h < r
        assert!(singular_locus(&both(2), &MtPoint::real(&[1.3, 0.4, -1.7]).unwrap()).is_none());
    }

    #[test]
    fn shifted_hyperplanes() {
        let w = singular_locus(&both(2), &MtPoint::real(&[-2.5, 3.0, 0.5]).unwrap()).unwrap();
        assert_eq!((w.subset.clone(), w.l), (vec![1], 3));
        let p = MtPoint::real(&[-2.5, 3.0, 0.5004]).unwrap();
        assert!(singular_locus(&both(2), &p).is_some());
        let p = MtPoint::real(&[-2.5, 3.0, 0.502]).unwrap();
        assert!(singular_locus(&both(2), &p).is_none());
        let p = MtPoint::new(vec![Complex64::new(0.5, 0.0), Complex64::new(3.0, 0.0), Complex64::new(0.5, 0.1)]).unwrap();
        assert!(singular_locus(&both(2), &p).is_none());
    }

    #[test]
    fn no_principal_slots() {
        let spec = SingularLocusSpec::new(2, vec![], DEFAULT_BAND).unwrap();
        for s in [[0.5, 0.5, 0.5], [0.7, 0.9, 0.4], [1.0, 0.0, 0.0]] {
            assert!(singular_locus(&spec, &MtPoint::real(&s).unwrap()).is_none());
        }
        let chi = CoefficientSequence::character(4, 1).unwrap();
        let spec = SingularLocusSpec::from_coeffs(&[chi.clone(), chi], DEFAULT_BAND).unwrap();
        assert!(spec.principal_indices.is_empty());
    }

    #[test]
    fn spec_validation() {
        assert!(SingularLocusSpec::new(2, vec![1], 0.0).is_err());
        assert!(SingularLocusSpec::new(2, vec![3], 1e-3).is_err());
        let spec = SingularLocusSpec::from_coeffs(
            &[CoefficientSequence::ones(), CoefficientSequence::character(4, 0).unwrap()],
            1e-3,
        )
        .unwrap();
        assert_eq!(spec.principal_indices, vec![1, 2]);
    }
}
