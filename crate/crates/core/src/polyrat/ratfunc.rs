use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::fp::FpPoly;
use super::poly::{horner_mod, IntPoly};
use crate::error::{domain, Result};
use crate::padic::{self, inv_mod, mul_mod, INFINITE_ORD};

/// Rational function `num / den` in lowest terms over ℤ: the polynomials are
/// coprime over ℚ, their contents are coprime, and `den` has positive leading
/// coefficient. Zero is `0 / 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatFunc {
    num: IntPoly,
    den: IntPoly,
}

/// Degree and valuation measures of a rational function at a prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Measures {
    pub deg: usize,
    /// `None` when the denominator vanishes identically mod `p`.
    pub deg_p: Option<usize>,
    /// `None` for the zero function.
    pub ord_p: Option<i64>,
}

/// Result of reducing a rational function at a residue.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModValue {
    Value(u64),
    Pole,
}

impl RatFunc {
    pub fn new(num: IntPoly, den: IntPoly) -> Result<Self> {
        if den.is_zero() {
            return domain("zero denominator");
        }
        Ok(Self::normalize(num, den))
    }

    fn normalize(num: IntPoly, den: IntPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let (mut num, mut den) = if den.is_constant() {
            (num, den)
        } else {
            let g = num.gcd(&den);
            if g.is_constant() {
                (num, den)
            } else {
                (
                    num.div_exact(&g).expect("gcd divides"),
                    den.div_exact(&g).expect("gcd divides"),
                )
            }
        };
        let mut c = num.content().gcd(&den.content());
        if den.lc().is_some_and(Signed::is_negative) {
            c = -c;
        }
        if !c.is_one() {
            num = num.div_scalar_exact(&c);
            den = den.div_scalar_exact(&c);
        }
        Self { num, den }
    }

    pub fn zero() -> Self {
        Self {
            num: IntPoly::zero(),
            den: IntPoly::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_poly(IntPoly::one())
    }

    pub fn x() -> Self {
        Self::from_poly(IntPoly::x())
    }

    pub fn from_poly(p: IntPoly) -> Self {
        Self::normalize(p, IntPoly::one())
    }

    pub fn from_int(c: i64) -> Self {
        Self::from_poly(IntPoly::from_i64(&[c]))
    }

    pub fn constant(c: BigInt) -> Self {
        Self::from_poly(IntPoly::constant(c))
    }

    /// `a / b` for integers.
    pub fn ratio(a: BigInt, b: BigInt) -> Result<Self> {
        Self::new(IntPoly::constant(a), IntPoly::constant(b))
    }

    pub fn num(&self) -> &IntPoly {
        &self.num
    }

    pub fn den(&self) -> &IntPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    /// Polynomial over ℚ (constant denominator).
    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self::normalize(&self.num + &o.num, self.den.clone());
        }
        Self::normalize(
            &(&self.num * &o.den) + &(&o.num * &self.den),
            &self.den * &o.den,
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::normalize(&self.num * &o.num, &self.den * &o.den)
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        if o.is_zero() {
            return domain("division by the zero function");
        }
        Ok(Self::normalize(&self.num * &o.den, &self.den * &o.num))
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::normalize(self.num.scale(k), self.den.clone())
    }

    /// Multiply by `p^k` for a possibly negative `k`.
    pub fn mul_p_pow(&self, p: u64, k: i64) -> Self {
        let pk = BigInt::from(p).pow(k.unsigned_abs() as u32);
        if k >= 0 {
            Self::normalize(self.num.scale(&pk), self.den.clone())
        } else {
            Self::normalize(self.num.clone(), self.den.scale(&pk))
        }
    }

    pub fn pow(&self, e: i32) -> Result<Self> {
        let base = if e < 0 {
            Self::one().div(self)?
        } else {
            self.clone()
        };
        let n = e.unsigned_abs();
        Ok(Self::normalize(base.num.pow(n), base.den.pow(n)))
    }

    /// Quotient-rule derivative.
    pub fn derivative(&self) -> Self {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Self::normalize(n, &self.den * &self.den)
    }

    /// `self(a + sX)`.
    pub fn affine(&self, a: &BigInt, s: &BigInt) -> Self {
        Self::normalize(
            self.num.taylor_shift(a).scale_var(s),
            self.den.taylor_shift(a).scale_var(s),
        )
    }

    /// `max(deg num, deg den)`.
    pub fn deg(&self) -> usize {
        self.num.deg().max(self.den.deg())
    }

    /// `ord_p(num) - ord_p(den)`, `None` for zero.
    pub fn ord_p(&self, p: u64) -> Option<i64> {
        let a = self.num.ord_p(p);
        (a != INFINITE_ORD).then(|| a as i64 - self.den.ord_p(p) as i64)
    }

    /// Reduction mod `p` in lowest terms over `𝔽_p`; `None` if the
    /// denominator vanishes identically mod `p`.
    pub fn reduce_mod_p(&self, p: u64) -> Option<(FpPoly, FpPoly)> {
        let den = self.den.mod_p(p);
        if den.is_zero() {
            return None;
        }
        let num = self.num.mod_p(p);
        if num.is_zero() {
            return Some((num, FpPoly::one(p)));
        }
        let g = num.gcd(&den);
        Some((num.div(&g), den.div(&g)))
    }

    /// Degree of the reduction mod `p` in lowest terms.
    pub fn deg_p(&self, p: u64) -> Option<usize> {
        self.reduce_mod_p(p).map(|(n, d)| n.deg().max(d.deg()))
    }

    pub fn measures(&self, p: u64) -> Measures {
        Measures {
            deg: self.deg(),
            deg_p: self.deg_p(p),
            ord_p: self.ord_p(p),
        }
    }

    /// `num(x) · den(x)^{-1} mod q`, or [`ModValue::Pole`] when `p | den(x)`.
    pub fn eval_mod(&self, x: &BigInt, pp: padic::PrimePower) -> Result<ModValue> {
        if self.ord_p(pp.p()).is_some_and(|o| o < 0) {
            return domain("negative valuation: values are not p-integral");
        }
        let q = pp.q();
        let xr = padic::reduce_big(x, q);
        Ok(CompiledRat::new(self, q, pp.p()).eval(xr))
    }

    /// Laurent view: `Some` when the denominator is a monomial `c X^k`.
    pub fn laurent(&self) -> Option<Laurent> {
        let k = self.den.low_degree()?;
        if k != self.den.deg() {
            return None;
        }
        let low = self.num.low_degree().unwrap_or(0);
        let coeffs = self.num.coeffs()[low..].to_vec();
        Some(Laurent {
            low: low as i64 - k as i64,
            coeffs,
            denom: self.den.lc().unwrap().clone(),
        })
    }

    /// Canonical serialization `(c0,...,cd)/(b0,...,be)`.
    pub fn serialize(&self) -> String {
        let join = |p: &IntPoly| {
            p.coeffs()
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        format!("({})/({})", join(&self.num), join(&self.den))
    }

    /// Inverse of [`RatFunc::serialize`].
    pub fn deserialize(s: &str) -> Result<Self> {
        let bad = || crate::Error::Parse {
            pos: 0,
            msg: format!("not a canonical rational function: {s}"),
        };
        let (a, b) = s.split_once(")/(").ok_or_else(bad)?;
        let a = a.strip_prefix('(').ok_or_else(bad)?;
        let b = b.strip_suffix(')').ok_or_else(bad)?;
        let parse = |t: &str| -> Result<IntPoly> {
            if t.is_empty() {
                return Ok(IntPoly::zero());
            }
            t.split(',')
                .map(|c| c.trim().parse::<BigInt>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()
                .map(IntPoly::new)
        };
        Self::new(parse(a)?, parse(b)?)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == IntPoly::one() {
            return write!(f, "{}", self.num);
        }
        let num = self.num.to_string();
        let num = if self.num.coeffs().iter().filter(|c| !c.is_zero()).count() > 1 {
            format!("({num})")
        } else {
            num
        };
        let den = self.den.to_string();
        let den = if self.den.is_constant() || den == "x" {
            den
        } else {
            format!("({den})")
        };
        write!(f, "{num}/{den}")
    }
}

/// Laurent polynomial `Σ_i coeffs[i] / denom · X^{low + i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Laurent {
    pub low: i64,
    pub coeffs: Vec<BigInt>,
    pub denom: BigInt,
}

impl Laurent {
    pub fn high(&self) -> i64 {
        self.low + self.coeffs.len() as i64 - 1
    }

    /// `max(|d1|, |d2|)`.
    pub fn degree(&self) -> u64 {
        self.low.unsigned_abs().max(self.high().unsigned_abs())
    }

    /// Whether the coefficient of `X^e` is a p-adic unit.
    pub fn coeff_is_unit(&self, e: i64, p: u64) -> bool {
        let i = e - self.low;
        if i < 0 || i as usize >= self.coeffs.len() {
            return false;
        }
        let c = &self.coeffs[i as usize];
        !c.is_zero() && padic::ord_p_big(c, p) == padic::ord_p_big(&self.denom, p)
    }
}

/// A rational function with coefficients reduced mod `q`, for fast repeated
/// evaluation. Requires `ord_p ≥ 0` semantics: the value is reported as a pole
/// whenever `p` divides the denominator value.
#[derive(Clone, Debug)]
pub struct CompiledRat {
    q: u64,
    p: u64,
    num: Vec<u64>,
    den: Vec<u64>,
    den_is_one: bool,
    inverses: Option<std::sync::Arc<[u32]>>,
}

impl CompiledRat {
    pub fn new(f: &RatFunc, q: u64, p: u64) -> Self {
        let den = f.den.residues(q);
        let den_is_one = den == [1 % q] && f.den.is_constant();
        let inverses = if den_is_one {
            None
        } else {
            padic::inverse_table(q)
        };
        Self {
            q,
            p,
            num: f.num.residues(q),
            den,
            den_is_one,
            inverses,
        }
    }

    /// Value at `x ∈ [0, q)`.
    #[inline]
    pub fn eval(&self, x: u64) -> ModValue {
        let n = horner_mod(&self.num, x, self.q);
        if self.den_is_one {
            return ModValue::Value(n);
        }
        let d = horner_mod(&self.den, x, self.q);
        if d.is_multiple_of(self.p) {
            return ModValue::Pole;
        }
        let inv = match &self.inverses {
            Some(t) => u64::from(t[d as usize]),
            None => inv_mod(d, self.q).expect("unit"),
        };
        ModValue::Value(mul_mod(n, inv, self.q))
    }

    /// Numerator and denominator values, for callers that batch inversions.
    #[inline]
    pub fn eval_parts(&self, x: u64) -> (u64, u64) {
        let n = horner_mod(&self.num, x, self.q);
        let d = if self.den_is_one {
            1
        } else {
            horner_mod(&self.den, x, self.q)
        };
        (n, d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PrimePower;

    fn rf(n: &[i64], d: &[i64]) -> RatFunc {
        RatFunc::new(IntPoly::from_i64(n), IntPoly::from_i64(d)).unwrap()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(rf(&[-1, 0, 1], &[-1, 1]), rf(&[1, 1], &[1]));
        assert_eq!(rf(&[0], &[5]), RatFunc::zero());
        assert_eq!(rf(&[0, 2, 2], &[0, 2]), rf(&[1, 1], &[1]));
        assert_eq!(rf(&[3], &[-6]).serialize(), "(-1)/(2)");
        assert!(RatFunc::new(IntPoly::one(), IntPoly::zero()).is_err());
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(rf(&[0, 0, 0, 1], &[1]).derivative(), rf(&[0, 0, 3], &[1]));
        assert_eq!(rf(&[1], &[0, 1]).derivative(), rf(&[-1], &[0, 0, 1]));
        assert_eq!(rf(&[0, 1], &[1, 1]).derivative(), rf(&[1], &[1, 2, 1]));
    }

    #[test]
    fn measure_examples() {
        assert_eq!(rf(&[1], &[0, 1]).deg(), 1);
        assert_eq!(rf(&[0, 1, 0, 5], &[1]).deg_p(5), Some(1));
        assert_eq!(rf(&[0, 25, 10], &[1]).ord_p(5), Some(1));
        assert_eq!(rf(&[1], &[0, 5]).deg_p(5), None);
        assert_eq!(rf(&[1], &[0, 5]).ord_p(5), Some(-1));
        // (x^2 - 1)/(x + 4) over F_5 cancels to x - 1.
        assert_eq!(rf(&[-1, 0, 1], &[4, 1]).deg_p(5), Some(1));
    }

    #[test]
    fn eval_examples() {
        let pp = PrimePower::new(5, 2).unwrap();
        assert_eq!(
            rf(&[0, 0, 1], &[1]).eval_mod(&3.into(), pp).unwrap(),
            ModValue::Value(9)
        );
        assert_eq!(
            rf(&[1], &[0, 1]).eval_mod(&5.into(), pp).unwrap(),
            ModValue::Pole
        );
        let pp = PrimePower::new(3, 2).unwrap();
        assert_eq!(
            rf(&[0, 1], &[1, 1]).eval_mod(&1.into(), pp).unwrap(),
            ModValue::Value(5)
        );
        assert!(rf(&[1], &[3]).eval_mod(&1.into(), pp).is_err());
        assert_eq!(
            rf(&[1], &[0, 1]).eval_mod(&3.into(), pp).unwrap(),
            ModValue::Pole
        );
    }

    #[test]
    fn laurent_view() {
        let f = rf(&[1, 0, 0, 0, 1], &[0, 0, 1]);
        let l = f.laurent().unwrap();
        assert_eq!((l.low, l.high(), l.degree()), (-2, 2, 2));
        assert!(rf(&[1], &[1, 1]).laurent().is_none());
    }

    #[test]
    fn serialization_round_trip() {
        let f = rf(&[1, -2, 3], &[0, 4]);
        assert_eq!(RatFunc::deserialize(&f.serialize()).unwrap(), f);
        assert_eq!(RatFunc::zero().serialize(), "()/(1)");
        assert_eq!(RatFunc::deserialize("()/(1)").unwrap(), RatFunc::zero());
    }
}
