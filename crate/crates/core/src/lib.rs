//! Mordell-Tornheim multiple Dirichlet series, the Tricomi confluent
//! hypergeometric function, Dirichlet L-functions, and residual checks for
//! the functional equations that tie them together.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, the grid
//! runner and the command-line tool live in the companion `mtds` crate.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

extern crate alloc;

pub mod arith;
pub mod complex;
pub mod error;
pub mod mt;
pub mod psi;
pub mod verify;
mod quad;
pub mod zeta_l;

pub use error::{Error, Result};
