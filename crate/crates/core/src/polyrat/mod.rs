//! Exact integer polynomials, rational functions over ℤ, polynomials over
//! `𝔽_p`, truncated p-adic power series and an expression parser.

mod fp;
mod parse;
mod poly;
mod ratfunc;
mod series;

use num_bigint::BigInt;

pub use fp::{berlekamp, FpPoly};
pub use parse::parse_ratfunc;
pub use poly::IntPoly;
pub use ratfunc::{CompiledRat, Laurent, Measures, ModValue, RatFunc};
pub use series::{series_log1p, taylor_series, PSeries};

use crate::Result;

/// Number of distinct complex zeros of a nonzero polynomial.
pub fn distinct_zeros(h: &IntPoly) -> Result<usize> {
    h.distinct_zeros()
}

/// Witness for `g ≡ b·h^r (mod p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RthPower {
    pub b: u64,
    pub h: RatFunc,
}

fn lift(f: &FpPoly) -> IntPoly {
    IntPoly::new(f.coeffs().iter().map(|&c| BigInt::from(c)).collect())
}

/// Decides whether `g ≡ b·h^r (mod p)` for some constant `b` and rational
/// function `h`, by factoring numerator and denominator over `𝔽_p`.
pub fn rth_power_test(g: &RatFunc, r: u32, p: u64) -> Option<RthPower> {
    let (num, den) = g.reduce_mod_p(p)?;
    if num.is_zero() || r == 0 {
        return None;
    }
    let (ln, fnum) = num.factor();
    let (ld, fden) = den.factor();
    if fnum.iter().chain(&fden).any(|(_, e)| e % r != 0) {
        return None;
    }
    let build = |fs: &[(FpPoly, u32)]| {
        fs.iter()
            .fold(FpPoly::one(p), |acc, (f, e)| acc.mul(&f.pow(e / r)))
    };
    let h = RatFunc::new(lift(&build(&fnum)), lift(&build(&fden))).ok()?;
    let b = crate::padic::mul_mod(ln, crate::padic::inv_mod(ld, p)?, p);
    Some(RthPower { b, h })
}
