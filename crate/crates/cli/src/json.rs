//! JSON values with lossless floats: every real is written with 17
//! significant digits, so reading a document back and writing it again
//! reproduces it byte for byte.

use std::fmt;
use std::io;

use mtds_core::complex::parse_complex;
use num_complex::Complex64;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::text::{fmt_complex, fmt_real};

/// A real number. Non-finite values are written as the strings `inf`,
/// `-inf` and `NaN`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else {
            s.serialize_str(&fmt_real(self.0))
        }
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Real;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number, or inf, -inf or NaN")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Real, E> {
                Ok(Real(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Real, E> {
                match v {
                    "inf" | "-inf" | "NaN" => Ok(Real(v.parse().unwrap())),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// A complex number, written as an `a+bi` string; plain numbers are accepted
/// on input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scalar(pub Complex64);

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_complex(self.0))
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Scalar;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or an \"a+bi\" string")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Scalar, E> {
                Ok(Scalar(Complex64::new(v, 0.0)))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Scalar, E> {
                self.visit_f64(v as f64)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Scalar, E> {
                self.visit_f64(v as f64)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Scalar, E> {
                parse_complex(v).map(Scalar).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

/// Pretty printing with `{:.16e}` floats.
struct Lossless<'a>(PrettyFormatter<'a>);

macro_rules! delegate {
    ($($name:ident $(($arg:ident: $ty:ty))?;)*) => {
        $(fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W $(, $arg: $ty)?) -> io::Result<()> {
            self.0.$name(w $(, $arg)?)
        })*
    };
}

impl Formatter for Lossless<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt_real(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    delegate! {
        begin_array;
        end_array;
        begin_array_value(first: bool);
        end_array_value;
        begin_object;
        end_object;
        begin_object_key(first: bool);
        begin_object_value;
        end_object_value;
    }
}

/// Indented JSON with a trailing newline.
pub fn to_string<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Lossless(PrettyFormatter::with_indent(b"  ")));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize, Deserialize)]
    struct Doc {
        x: Real,
        y: Real,
        z: Vec<Scalar>,
        n: u64,
        tag: String,
    }

    #[test]
    fn reprint_is_identical() {
        let doc = Doc {
            x: Real(1.0 / 3.0),
            y: Real(f64::NAN),
            z: vec![Scalar(Complex64::new(0.1, -7e-300)), Scalar(Complex64::new(-0.0, 2.5))],
            n: 12,
            tag: "a\"b".into(),
        };
        let first = to_string(&doc).unwrap();
        let back: Doc = serde_json::from_str(&first).unwrap();
        assert_eq!(to_string(&back).unwrap(), first);
        assert!(first.contains("\"x\": 3.3333333333333331e-1"), "{first}");
    }

    #[test]
    fn parsing_is_correctly_rounded() {
        for text in ["9.9999999999999995e-7", "4.7246424948352881e-9", "2.2150790519629434e-15"] {
            let back: Real = serde_json::from_str(text).unwrap();
            assert_eq!(back.0.to_bits(), text.parse::<f64>().unwrap().to_bits(), "{text}");
        }
    }

    #[test]
    fn inputs_accept_plain_numbers() {
        let z: Scalar = serde_json::from_str("2").unwrap();
        assert_eq!(z.0, Complex64::new(2.0, 0.0));
        let z: Scalar = serde_json::from_str("\"0.5-14i\"").unwrap();
        assert_eq!(z.0, Complex64::new(0.5, -14.0));
        let x: Real = serde_json::from_str("\"-inf\"").unwrap();
        assert_eq!(x.0, f64::NEG_INFINITY);
        assert!(serde_json::from_str::<Real>("\"oops\"").is_err());
    }
}
