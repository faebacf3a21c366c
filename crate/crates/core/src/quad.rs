//! Trapezoidal quadrature along vertical lines.

use alloc::format;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

const EPS: f64 = f64::EPSILON;

pub(crate) struct LineIntegral {
    pub value: Complex64,
    pub error: f64,
}

/// `(2 pi)^{-1} int_{-T}^{T} f(t) dt`, i.e. the contour integral
/// `(2 pi i)^{-1} int` over the line when `f(t)` is the integrand at
/// `gamma + i t`. The error adds the step-halving estimate (squared, as the
/// rule converges geometrically in `1/h`), the tails beyond `T` from the
/// local decay rate, and rounding.
pub(crate) fn line_integral<F>(f: F, height: f64, step: f64) -> Result<LineIntegral>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let mut n = (height / step).ceil() as usize;
    n += n % 2;
    let h = height / n as f64;
    let mut fine = f(0.0)?;
    let mut coarse = fine;
    let mut l1 = fine.norm();
    for j in 1..=n {
        let t = j as f64 * h;
        let pair = f(t)? + f(-t)?;
        let w = if j == n { 0.5 } else { 1.0 };
        fine += pair * w;
        l1 += pair.norm() * w;
        if j % 2 == 0 {
            coarse += pair * w;
        }
    }
    let fine = fine * h / (2.0 * PI);
    let coarse = coarse * 2.0 * h / (2.0 * PI);
    let scale = l1 * h / (2.0 * PI);
    let raw = (fine - coarse).norm();
    let discretization = if scale > 0.0 {
        raw.min(10.0 * raw * raw / scale)
    } else {
        0.0
    };
    let mut truncation = 0.0;
    for sign in [1.0, -1.0] {
        let end = f(sign * height)?.norm();
        if end == 0.0 {
            continue;
        }
        let inner = f(sign * (height - 1.0))?.norm();
        let rate = (inner / end).ln();
        if !(rate > 0.05) {
            return Err(Error::Nonconvergence {
                what: "Mellin-Barnes tail",
                detail: format!("integrand not decaying at |Im z| = {height} (rate {rate})"),
            });
        }
        truncation += end / rate / (2.0 * PI);
    }
    let rounding = 64.0 * EPS * scale * (1.0 + height.ln_1p());
    Ok(LineIntegral {
        value: fine,
        error: discretization + truncation + rounding,
    })
}
