//! One-variable building blocks: Dirichlet characters, Gauss sums, Hurwitz
//! and Riemann zeta, Dirichlet L-functions and their functional equations.

mod characters;
mod zeta;

pub use characters::{characters_mod, character, gauss_sum, root_of_unity, DirichletCharacter, RootNumber};
pub use zeta::{
    dirichlet_l, dirichlet_l_em, fe_l_rhs, fe_zeta_rhs, hurwitz_zeta, principal_l_via_zeta, riemann_zeta,
    riemann_zeta_em, IM_ENVELOPE,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{c, real};
    use crate::error::Error;
    use core::f64::consts::PI;
    use num_complex::Complex64;

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    /// Plain summation to 2000 plus a four-term tail; independent of the
    /// library's cutoff and correction order.
    fn hurwitz_oracle(s: Complex64, a: f64) -> Complex64 {
        let n = 2000usize;
        let mut head = Complex64::new(0.0, 0.0);
        for k in 0..n {
            head += (-s * (k as f64 + a).ln()).exp();
        }
        let x = n as f64 + a;
        let xs = (-s * x.ln()).exp();
        let p3 = s * (s + 1.0) * (s + 2.0);
        head + xs * x / (s - 1.0) + xs * 0.5 + s * xs / x / 12.0 - p3 * xs / (x * x * x) / 720.0
    }

    #[test]
    fn hurwitz_examples() {
        let z2 = hurwitz_zeta(real(2.0), 1.0).unwrap();
        assert!(rel(z2, real(PI * PI / 6.0)) < 1e-13);
        let zh = hurwitz_zeta(real(2.0), 0.5).unwrap();
        assert!(rel(zh, real(PI * PI / 2.0)) < 1e-13);
        let s = c(-0.5, 3.0);
        let got = hurwitz_zeta(s, 0.4).unwrap();
        assert!(rel(got, hurwitz_oracle(s, 0.4)) < 1e-10);
        // mpmath: zeta(-0.5+3j, 0.4)
        let frozen = c(-0.582_750_586_455_010_2, -0.166_160_329_777_109_23);
        assert!(rel(got, frozen) < 1e-11);
    }

    #[test]
    fn hurwitz_errors() {
        assert!(matches!(hurwitz_zeta(real(1.0), 0.3), Err(Error::Pole { .. })));
        assert!(matches!(hurwitz_zeta(c(2.0, 2000.0), 0.3), Err(Error::Envelope { .. })));
        assert!(hurwitz_zeta(real(2.0), 1.5).is_err());
    }

    #[test]
    fn riemann_classical_values() {
        assert!((riemann_zeta(real(0.0)).unwrap() - real(-0.5)).norm() < 1e-14);
        assert!((riemann_zeta(real(-1.0)).unwrap() - real(-1.0 / 12.0)).norm() < 1e-13);
        assert!(rel(riemann_zeta(real(2.0)).unwrap(), real(PI * PI / 6.0)) < 1e-14);
        // mpmath references
        let v = riemann_zeta(c(0.5, 14.0)).unwrap();
        assert!(rel(v, c(0.022_241_142_609_993_59, -0.103_258_123_266_450_06)) < 1e-11);
        let v = riemann_zeta(c(-3.5, 25.0)).unwrap();
        assert!(rel(v, c(-144.823_527_668_975_17, -208.368_426_315_546_03)) < 1e-10);
    }

    #[test]
    fn dirichlet_examples() {
        let one = character(1, 0).unwrap();
        assert!(rel(dirichlet_l(real(2.0), &one).unwrap(), real(PI * PI / 6.0)) < 1e-13);
        let chi4 = character(4, 1).unwrap();
        assert!(rel(dirichlet_l(real(1.0), &chi4).unwrap(), real(PI / 4.0)) < 1e-13);
        let catalan = 0.915_965_594_177_219_f64;
        assert!(rel(dirichlet_l(real(2.0), &chi4).unwrap(), real(catalan)) < 1e-13);
        let v = dirichlet_l(c(-0.5, -1.0), &chi4).unwrap();
        assert!(rel(v, c(0.399_566_602_861_789_06, -0.523_030_747_461_122_8)) < 1e-12);
        assert!((dirichlet_l(real(0.0), &chi4).unwrap() - real(0.5)).norm() < 1e-13);
        let principal = character(6, 0).unwrap();
        assert!(matches!(dirichlet_l(real(1.0), &principal), Err(Error::Pole { .. })));
    }

    /// `L(1-n, chi) = -B_{n,chi}/n` with `B_{n,chi} = q^{n-1} sum_a chi(a) B_n(a/q)`.
    fn generalized_bernoulli_2(chi: &DirichletCharacter) -> Complex64 {
        let q = chi.modulus() as f64;
        let b2 = |x: f64| x * x - x + 1.0 / 6.0;
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 1..=chi.modulus() {
            acc += chi.value(a) * b2(a as f64 / q);
        }
        acc * q
    }

    #[test]
    fn fe_examples() {
        assert!(rel(fe_zeta_rhs(real(2.0)).unwrap(), real(-1.0 / 12.0)) < 1e-13);
        assert!(rel(fe_zeta_rhs(real(4.0)).unwrap(), real(1.0 / 120.0)) < 1e-13);
        let s = c(3.0, 2.0);
        assert!(rel(fe_zeta_rhs(s).unwrap(), riemann_zeta(1.0 - s).unwrap()) < 1e-9);

        let chi4 = character(4, 1).unwrap();
        let oracle = -generalized_bernoulli_2(&chi4) / 2.0;
        let got = fe_l_rhs(real(2.0), &chi4).unwrap();
        assert!((got - oracle).norm() < 1e-13, "{got} vs {oracle}");
        assert!(got.norm() < 1e-13);
        let quad5 = character(5, 2).unwrap();
        let oracle = -generalized_bernoulli_2(&quad5) / 2.0;
        assert!(rel(oracle, real(-0.4)) < 1e-14);
        let got = fe_l_rhs(real(2.0), &quad5).unwrap();
        assert!(rel(got, dirichlet_l(real(-1.0), &quad5).unwrap()) < 1e-9);
        assert!(rel(got, oracle) < 1e-12);
        let s = c(1.5, 1.0);
        assert!(rel(fe_l_rhs(s, &chi4).unwrap(), dirichlet_l(1.0 - s, &chi4).unwrap()) < 1e-9);
        let imprimitive = character(8, 1).unwrap();
        if !imprimitive.is_primitive() {
            assert!(matches!(fe_l_rhs(s, &imprimitive), Err(Error::NotPrimitive { .. })));
        }
        assert!(matches!(
            fe_l_rhs(s, &character(6, 0).unwrap()),
            Err(Error::NotPrimitive { .. })
        ));
    }

    fn grid() -> alloc::vec::Vec<Complex64> {
        // 100 points, Re in [1.2, 5], |Im| <= 30; irrational offsets keep
        // the grid off the trivial zeros
        let mut pts = alloc::vec::Vec::new();
        for i in 0..10 {
            for j in 0..10 {
                let re = 1.2 + 3.8 * (i as f64 + 0.37) / 10.0;
                let im = -30.0 + 60.0 * (j as f64 + 0.5) / 10.0;
                pts.push(c(re, im));
            }
        }
        pts
    }

    #[test]
    fn fe_zeta_grid() {
        for s in grid() {
            let lhs = riemann_zeta(1.0 - s).unwrap();
            assert!(rel(fe_zeta_rhs(s).unwrap(), lhs) <= 1e-8, "s = {s}");
        }
    }

    #[test]
    fn fe_l_grid_small_moduli() {
        for q in 3..=8u64 {
            for chi in characters_mod(q).unwrap().into_iter().filter(|x| x.is_primitive()) {
                for s in grid().into_iter().step_by(7) {
                    let lhs = dirichlet_l(1.0 - s, &chi).unwrap();
                    let rhs = fe_l_rhs(s, &chi).unwrap();
                    assert!(rel(rhs, lhs) <= 1e-8, "q = {q}, s = {s}");
                }
            }
        }
    }

    #[test]
    fn principal_l_matches_euler_factor() {
        for q in [2u64, 6, 10, 12] {
            let chi = character(q, 0).unwrap();
            for s in [c(1.5, 0.0), c(2.0, 5.0), c(3.3, -12.0)] {
                let a = dirichlet_l(s, &chi).unwrap();
                let b = principal_l_via_zeta(s, q).unwrap();
                assert!(rel(a, b) < 1e-10, "q = {q}, s = {s}");
            }
        }
    }
}
