//! Text forms of numbers and lists used in flags, reports and tables.

use mtds_core::complex::parse_complex;
use mtds_core::verify::AxisRange;
use mtds_core::{Error, Result};
use num_complex::Complex64;

/// Shortest form with 17 significant digits, e.g. `2.4041138063191885e0`.
/// Non-finite values print as `inf`, `-inf` and `NaN`.
pub fn fmt_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// `a+bi` with both parts as in [`fmt_real`].
pub fn fmt_complex(z: Complex64) -> String {
    let im = fmt_real(z.im);
    let sign = if im.starts_with('-') { "" } else { "+" };
    format!("{}{sign}{im}i", fmt_real(z.re))
}

/// Splits on commas that are not inside brackets, so `ones,finite:[1,-1]`
/// gives two items.
pub fn split_top_level(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (k, ch) in text.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(text[start..k].trim());
                start = k + 1;
            }
            _ => {}
        }
    }
    out.push(text[start..].trim());
    out
}

pub fn parse_complex_list(text: &str) -> Result<Vec<Complex64>> {
    split_top_level(text).into_iter().map(parse_complex).collect()
}

/// `start:stop:step`, or `start:stop` with unit step.
pub fn parse_range(text: &str) -> Result<AxisRange> {
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    let num = |u: &str| {
        u.parse::<f64>()
            .map_err(|_| Error::InvalidInput(format!("range {text:?}: cannot parse {u:?}")))
    };
    match parts.as_slice() {
        [a, b] => Ok(AxisRange { start: num(a)?, stop: num(b)?, step: 1.0 }),
        [a, b, h] => Ok(AxisRange { start: num(a)?, stop: num(b)?, step: num(h)? }),
        _ => Err(Error::InvalidInput(format!("range {text:?}: expected start:stop:step"))),
    }
}
