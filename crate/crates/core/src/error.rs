use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

/// Every failure mode of the numerical kernels and checkers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("Gamma pole at {z} ({role} argument #{index})")]
    GammaPole {
        role: &'static str,
        index: usize,
        z: Complex64,
    },
    #[error("power of a zero base")]
    ZeroBase,
    #[error("{what}: {value} exceeds the maximum {max}")]
    OutOfRange {
        what: &'static str,
        value: usize,
        max: usize,
    },
    #[error("pole of {what} at s = {s}")]
    Pole { what: &'static str, s: Complex64 },
    #[error("argument {s} outside the validated envelope |Im s| <= {limit}")]
    Envelope { s: Complex64, limit: f64 },
    #[error("{what} did not converge: {detail}")]
    Nonconvergence { what: &'static str, detail: String },
    #[error("character mod {q} (index {index}) is not primitive")]
    NotPrimitive { q: u64, index: usize },
    #[error("validity condition violated: {0}")]
    Validity(String),
    #[error("Mellin-Barnes abscissa interval ({lo}, {hi}) is empty")]
    AbscissaInfeasible { lo: f64, hi: f64 },
    #[error("contour integral diverges: |arg x| = {arg} too close to 3pi/2")]
    Divergence { arg: f64 },
    #[error("remainder estimate invalid: {0}")]
    BoundInvalid(String),
    #[error("zero argument")]
    ZeroArgument,
    #[error("all Psi routes failed: {}", .0.join("; "))]
    AllRoutesFailed(Vec<String>),
    #[error("point outside the absolute-convergence region: subset {} has slack {slack}", subset_text(.witness))]
    Region { witness: Vec<usize>, slack: f64 },
    #[error("term budget exceeded: {needed} terms needed, budget {budget}")]
    Budget { needed: f64, budget: f64 },
    #[error("expansion length N = {n} too small: {detail}")]
    NTooSmall { n: usize, detail: String },
    #[error("empty contour window: {0}")]
    EmptyWindow(String),
    #[error("singular point: {0}")]
    Singular(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("point is not on the hyperplane s1 + s2 = {expected}")]
    HyperplaneMismatch { expected: i64 },
    #[error("parity mismatch: chi1(-1)chi2(-1) = {product} does not match the hyperplane type")]
    ParityMismatch { product: i32 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

fn subset_text(j: &[usize]) -> String {
    let parts: Vec<String> = j.iter().map(|k| alloc::format!("{k}")).collect();
    alloc::format!("{{{}}}", parts.join(", "))
}

pub type Result<T> = core::result::Result<T, Error>;
