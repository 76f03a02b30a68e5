use num_bigint::BigInt;

use super::ratfunc::RatFunc;
use crate::error::{domain, Result};
use crate::padic::{self, add_mod, inv_mod, mul_mod, ord_p, sub_mod, INFINITE_ORD};

/// Truncated power series `Σ_{j=0}^{T} a_j Y^j` with coefficients mod `p^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PSeries {
    p: u64,
    n: u32,
    modulus: u64,
    coeffs: Vec<u64>,
}

impl PSeries {
    pub fn new(p: u64, n: u32, coeffs: Vec<u64>) -> Self {
        let modulus = p.pow(n);
        let coeffs = coeffs.into_iter().map(|c| c % modulus).collect();
        Self {
            p,
            n,
            modulus,
            coeffs,
        }
    }

    pub fn zero(p: u64, n: u32, terms: usize) -> Self {
        Self::new(p, n, vec![0; terms])
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Precision exponent `n` (coefficients are mod `p^n`).
    pub fn precision(&self) -> u32 {
        self.n
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> u64 {
        self.coeffs.get(j).copied().unwrap_or(0)
    }

    /// Number of stored coefficients (`T + 1`).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Minimum p-adic valuation over the coefficients (capped at the precision).
    pub fn min_valuation(&self) -> u32 {
        self.coeffs
            .iter()
            .map(|&c| ord_p(c, self.p))
            .min()
            .unwrap_or(INFINITE_ORD)
            .min(self.n)
    }

    /// Highest index with a unit coefficient.
    pub fn unit_degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c % self.p != 0)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.len().max(o.len());
        Self::new(
            self.p,
            self.n,
            (0..n)
                .map(|j| add_mod(self.coeff(j), o.coeff(j), self.modulus))
                .collect(),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.len().max(o.len());
        Self::new(
            self.p,
            self.n,
            (0..n)
                .map(|j| sub_mod(self.coeff(j), o.coeff(j), self.modulus))
                .collect(),
        )
    }

    pub fn scale(&self, k: u64) -> Self {
        Self::new(
            self.p,
            self.n,
            self.coeffs
                .iter()
                .map(|&c| mul_mod(c, k, self.modulus))
                .collect(),
        )
    }

    /// Product truncated to the length of `self`.
    pub fn mul(&self, o: &Self) -> Self {
        let t = self.len();
        let mut out = vec![0u64; t];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate().take(t - i) {
                out[i + j] = add_mod(out[i + j], mul_mod(a, b, self.modulus), self.modulus);
            }
        }
        Self {
            p: self.p,
            n: self.n,
            modulus: self.modulus,
            coeffs: out,
        }
    }

    /// Formal derivative `Σ j a_j Y^{j-1}`.
    pub fn derivative(&self) -> Self {
        Self::new(
            self.p,
            self.n,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, &a)| mul_mod(a, j as u64 % self.modulus, self.modulus))
                .collect(),
        )
    }

    /// Exact division of every coefficient by `p^v` (which must divide them),
    /// lowering the precision to `n - v`.
    pub fn div_p_pow(&self, v: u32) -> Self {
        assert!(v <= self.n);
        let pv = self.p.pow(v);
        debug_assert!(self.coeffs.iter().all(|c| c % pv == 0));
        Self::new(
            self.p,
            self.n - v,
            self.coeffs.iter().map(|c| c / pv).collect(),
        )
    }

    /// Reduce to a lower precision.
    pub fn with_precision(&self, n: u32) -> Self {
        assert!(n <= self.n);
        Self::new(self.p, n, self.coeffs.clone())
    }

    pub fn truncate(&self, terms: usize) -> Self {
        Self::new(
            self.p,
            self.n,
            self.coeffs.iter().copied().take(terms).collect(),
        )
    }

    pub fn eval(&self, y: u64) -> u64 {
        super::poly::horner_mod(&self.coeffs, y % self.modulus, self.modulus)
    }

    /// Coefficients as integers in `[0, p^n)`.
    pub fn to_bigints(&self) -> Vec<BigInt> {
        self.coeffs.iter().map(|&c| BigInt::from(c)).collect()
    }
}

/// Coefficients of `f(α + sY)` mod `p^n`, `terms` of them, by power-series
/// division of the shifted numerator by the shifted denominator.
pub fn taylor_series(
    f: &RatFunc,
    alpha: &BigInt,
    scale: &BigInt,
    p: u64,
    n: u32,
    terms: usize,
) -> Result<PSeries> {
    let modulus = padic::checked_pow(p, n)
        .filter(|&q| q < padic::PrimePower::MAX_MODULUS)
        .ok_or_else(|| crate::Error::Domain(format!("{p}^{n} exceeds the supported range")))?;
    if f.ord_p(p).is_some_and(|o| o < 0) {
        return domain("series of a function with negative valuation");
    }
    let num = f
        .num()
        .taylor_shift(alpha)
        .scale_var(scale)
        .residues(modulus);
    let den = f
        .den()
        .taylor_shift(alpha)
        .scale_var(scale)
        .residues(modulus);
    let b0 = den.first().copied().unwrap_or(0);
    if b0 % p == 0 {
        return domain(format!("{alpha} is a pole modulo {p}"));
    }
    let inv = inv_mod(b0, modulus).expect("unit");
    let mut out = vec![0u64; terms];
    for j in 0..terms {
        let mut acc = num.get(j).copied().unwrap_or(0);
        for i in 1..=j.min(den.len().saturating_sub(1)) {
            acc = sub_mod(acc, mul_mod(den[i], out[j - i], modulus), modulus);
        }
        out[j] = mul_mod(acc, inv, modulus);
    }
    Ok(PSeries::new(p, n, out))
}

/// `log(1 + u) = Σ (-1)^{k-1} u^k / k` coefficientwise mod `p^n`, keeping the
/// term `k` exactly when `k v - ord_p(k) < n`, where `v` is the minimum
/// valuation of `u` (at least 1, or 2 when `p = 2`).
pub fn series_log1p(u: &PSeries) -> Result<PSeries> {
    let (p, n, modulus) = (u.p, u.n, u.modulus);
    let need = if p == 2 { 2 } else { 1 };
    let v = u.min_valuation();
    if v >= n {
        return Ok(PSeries::zero(p, n, u.len()));
    }
    if v < need {
        return domain(format!(
            "log(1+u) needs every coefficient divisible by {}",
            if p == 2 { 4 } else { p }
        ));
    }
    let pv = p.pow(v);
    let w = PSeries::new(p, n, u.coeffs.iter().map(|c| c / pv).collect());
    let mut acc = PSeries::zero(p, n, u.len());
    let mut w_pow = PSeries::new(p, n, {
        let mut one = vec![0u64; u.len()];
        if !one.is_empty() {
            one[0] = 1;
        }
        one
    });
    let bound = 2 * n as u64 + 64;
    for k in 1..=bound {
        w_pow = w_pow.mul(&w);
        let e = k * v as u64 - ord_p(k, p) as u64;
        if e >= n as u64 {
            continue;
        }
        let k_unit = k / p.pow(ord_p(k, p));
        let factor = mul_mod(
            p.pow(e as u32),
            inv_mod(k_unit % modulus, modulus).expect("unit"),
            modulus,
        );
        let term = w_pow.scale(factor);
        acc = if k % 2 == 1 {
            acc.add(&term)
        } else {
            acc.sub(&term)
        };
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyrat::IntPoly;

    fn rf(n: &[i64], d: &[i64]) -> RatFunc {
        RatFunc::new(IntPoly::from_i64(n), IntPoly::from_i64(d)).unwrap()
    }

    #[test]
    fn taylor_examples() {
        let one = BigInt::from(1);
        let s = taylor_series(&rf(&[0, 2], &[1]), &BigInt::from(0), &one, 5, 3, 3).unwrap();
        assert_eq!(s.coeffs(), &[0, 2, 0]);
        let s = taylor_series(&rf(&[1], &[1, -1]), &BigInt::from(0), &one, 3, 2, 4).unwrap();
        assert_eq!(s.coeffs(), &[1, 1, 1, 1]);
        let s = taylor_series(&rf(&[0, 0, 1], &[1]), &BigInt::from(1), &one, 5, 3, 3).unwrap();
        assert_eq!(s.coeffs(), &[1, 2, 1]);
        assert!(taylor_series(&rf(&[1], &[0, 1]), &BigInt::from(5), &one, 5, 3, 3).is_err());
    }

    #[test]
    fn log_examples() {
        assert!(series_log1p(&PSeries::zero(5, 3, 4)).unwrap().is_zero());
        let u = PSeries::new(5, 2, vec![0, 5, 0]);
        assert_eq!(series_log1p(&u).unwrap().coeffs(), &[0, 5, 0]);
        let u = PSeries::new(5, 3, vec![0, 5, 0]);
        assert_eq!(series_log1p(&u).unwrap().coeffs(), &[0, 5, 50]);
        assert!(series_log1p(&PSeries::new(5, 3, vec![0, 1])).is_err());
    }

    #[test]
    fn log_of_constant_matches_scalar_log() {
        for x in (1..125u64).step_by(5) {
            let u = PSeries::new(5, 3, vec![x - 1, 0]);
            let l = series_log1p(&u).unwrap();
            assert_eq!(l.coeff(0), padic::padic_log(x as i128, 5, 3).unwrap());
        }
    }
}
