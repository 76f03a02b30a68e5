//! Exact evaluation and bounding of mixed character sums
//!
//! `S(χ, g, f, p^m) = Σ χ(g(x)) e_{p^m}(f(x))`
//!
//! where `f` and `g` are rational functions with integer coefficients, `χ` is a
//! multiplicative character modulo `p^m`, and `x` runs over the residues where
//! every denominator and `g` itself are units.

pub mod bounds;
pub mod charmod;
pub mod critical;
mod error;
pub mod evaluate;
pub mod padic;
pub mod polyrat;

pub use error::{Error, Result};
