//! Modular arithmetic modulo prime powers, p-adic valuations and logarithms,
//! primitive roots, discrete logarithms and quadratic Gauss sums.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{domain, Result};

/// Valuation of zero.
pub const INFINITE_ORD: u32 = u32::MAX;

/// Deterministic primality test by trial division (intended for `n < 2^31`,
/// correct for every `u64`).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return false;
    }
    let mut d = 5u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) || n.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

/// Prime factorization by trial division, as `(prime, exponent)` pairs in
/// increasing order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// The modulus `p^m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PrimePower {
    p: u64,
    m: u32,
    q: u64,
}

impl PrimePower {
    /// Largest supported modulus (exclusive); products fit comfortably in `u128`.
    pub const MAX_MODULUS: u64 = 1 << 62;

    pub fn new(p: u64, m: u32) -> Result<Self> {
        if !is_prime(p) {
            return domain(format!("{p} is not prime"));
        }
        if m == 0 {
            return domain("exponent m must be at least 1");
        }
        let q = checked_pow(p, m)
            .filter(|&q| q < Self::MAX_MODULUS)
            .ok_or_else(|| crate::Error::Domain(format!("{p}^{m} exceeds the supported range")))?;
        Ok(Self { p, m, q })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// `p^k` for `k ≤ m`.
    pub fn pow(&self, k: u32) -> u64 {
        assert!(
            k <= self.m,
            "p^{k} requested above modulus exponent {}",
            self.m
        );
        self.p.pow(k)
    }

    /// The same prime with a different exponent.
    pub fn with_exponent(&self, m: u32) -> Result<Self> {
        Self::new(self.p, m)
    }

    /// Order of the unit group, `p^{m-1}(p-1)`.
    pub fn unit_count(&self) -> u64 {
        self.q / self.p * (self.p - 1)
    }

    pub fn is_unit(&self, x: u64) -> bool {
        !x.is_multiple_of(self.p)
    }

    /// Reduce a signed integer into `[0, q)`.
    pub fn reduce(&self, x: i128) -> u64 {
        reduce_i128(x, self.q)
    }
}

impl std::fmt::Display for PrimePower {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}^{}", self.p, self.m)
    }
}

pub fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    base.checked_pow(exp)
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    match a.checked_mul(b) {
        Some(v) => v % m,
        None => ((a as u128 * b as u128) % m as u128) as u64,
    }
}

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    match a.checked_add(b) {
        Some(v) => v % m,
        None => ((a as u128 + b as u128) % m as u128) as u64,
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    add_mod(a, m - b % m, m)
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m` by the extended Euclidean algorithm.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    // Moduli stay below 2^62, so every remainder and cofactor fits in i64.
    let (mut r0, mut r1) = (m as i64, (a % m) as i64);
    let (mut s0, mut s1) = (0i64, 1i64);
    while r1 != 0 {
        let k = r0 / r1;
        (r0, r1) = (r1, r0 - k * r1);
        (s0, s1) = (s1, s0 - k * s1);
    }
    (r0 == 1).then(|| reduce_i128(i128::from(s0), m))
}

/// Moduli up to this size get a cached table of inverses.
const INVERSE_TABLE_LIMIT: u64 = 1 << 20;

/// `x^{-1} mod q` for every `x ∈ [0, q)` (zero for non-units), cached per modulus.
pub fn inverse_table(q: u64) -> Option<Arc<[u32]>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<[u32]>>>> = OnceLock::new();
    if q > INVERSE_TABLE_LIMIT {
        return None;
    }
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.read().expect("inverse cache").get(&q) {
        return Some(t.clone());
    }
    let table: Arc<[u32]> = (0..q)
        .map(|x| inv_mod(x, q).map_or(0, |v| v as u32))
        .collect();
    Some(
        cache
            .write()
            .expect("inverse cache")
            .entry(q)
            .or_insert(table)
            .clone(),
    )
}

#[inline]
pub fn reduce_i128(x: i128, m: u64) -> u64 {
    x.rem_euclid(m as i128) as u64
}

pub fn reduce_big(x: &BigInt, m: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(m));
    r.to_u64().expect("residue fits in u64")
}

/// `ord_p(x)`, with [`INFINITE_ORD`] for zero.
pub fn ord_p(mut x: u64, p: u64) -> u32 {
    if x == 0 {
        return INFINITE_ORD;
    }
    let mut v = 0;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

/// `ord_p(x)` for a big integer, with [`INFINITE_ORD`] for zero.
pub fn ord_p_big(x: &BigInt, p: u64) -> u32 {
    if x.is_zero() {
        return INFINITE_ORD;
    }
    if let Some(small) = x.abs().to_u64() {
        return ord_p(small, p);
    }
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut y = x.abs();
    loop {
        let (quo, rem) = y.div_rem(&pb);
        if !rem.is_zero() {
            return v;
        }
        y = quo;
        v += 1;
    }
}

/// Truncated p-adic logarithm of `x ≡ 1` (mod p, or mod 4 when p = 2),
/// returned modulo `p^n`.
///
/// Writing `x - 1 = p^v u`, the term of index `j = p^k j'` is
/// `(-1)^{j-1} p^{jv-k} u^j / j'` and it is kept exactly when `jv - k < n`.
pub fn padic_log(x: i128, p: u64, n: u32) -> Result<u64> {
    if n == 0 {
        return domain("precision must be at least 1");
    }
    let modulus = checked_pow(p, n)
        .filter(|&q| q < PrimePower::MAX_MODULUS)
        .ok_or_else(|| crate::Error::Domain(format!("{p}^{n} exceeds the supported range")))?;
    let base = if p == 2 { 4 } else { p as i128 };
    if (x - 1).rem_euclid(base) != 0 {
        return domain(format!("log argument {x} is not 1 modulo {base}"));
    }
    let z = reduce_i128(x - 1, modulus);
    if z == 0 {
        return Ok(0);
    }
    let v = ord_p(z, p);
    let u = z / p.pow(v);
    let mut acc = 0u64;
    let mut u_pow = 1u64;
    let bound = 2 * n as u64 + 64;
    for j in 1..=bound {
        u_pow = mul_mod(u_pow, u, modulus);
        let k = ord_p(j, p);
        let e = j * v as u64 - k as u64;
        if e >= n as u64 {
            continue;
        }
        let j_unit = j / p.pow(k);
        let inv = inv_mod(j_unit % modulus, modulus).expect("unit");
        let term = mul_mod(mul_mod(p.pow(e as u32), u_pow, modulus), inv, modulus);
        acc = if j % 2 == 1 {
            add_mod(acc, term, modulus)
        } else {
            sub_mod(acc, term, modulus)
        };
    }
    Ok(acc)
}

/// Generator data for the unit group modulo `p^m`.
///
/// For odd `p`, `omega` is the smallest primitive root modulo `p^2`,
/// `omega^{p-1} = 1 + r p`, and `R = log(omega^{p-1}) / p` modulo `p^{m-1}`.
/// For `p = 2`, `omega = 5 = 1 + 4r` with `r = 1` and `R = log(5) / 4`
/// modulo `2^{m-2}`. `rbar` is the inverse of `R` modulo `log_modulus`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnitLogData {
    pub pp: PrimePower,
    pub omega: u64,
    /// `r` reduced modulo `p^m`.
    pub r: u64,
    pub big_r: u64,
    pub rbar: u64,
    /// `p^{m-1}` for odd `p`, `2^{m-2}` for `p = 2` (1 when `m ≤ 2`).
    pub log_modulus: u64,
}

impl UnitLogData {
    /// `R = log(5)/4` modulo `2^{m-2}` when `p = 2`.
    pub fn r2(&self) -> Option<u64> {
        (self.pp.p() == 2).then_some(self.big_r)
    }
}

/// Smallest primitive root modulo `p^2` (odd `p`).
pub fn smallest_primitive_root(p: u64) -> u64 {
    assert!(p > 2 && is_prime(p));
    let factors = factorize(p - 1);
    let p2 = p * p;
    (2..p)
        .find(|&g| {
            factors
                .iter()
                .all(|&(l, _)| pow_mod(g, (p - 1) / l, p) != 1)
                && pow_mod(g, p - 1, p2) != 1
        })
        .expect("primitive roots exist")
}

pub fn unit_log_data(pp: PrimePower) -> UnitLogData {
    let omega = if pp.p() == 2 {
        5
    } else {
        smallest_primitive_root(pp.p())
    };
    unit_log_data_with_root(pp, omega).expect("smallest primitive root is valid")
}

/// Generator data for an explicit primitive root `omega` modulo `p^2`
/// (`omega = 5` is required when `p = 2`).
pub fn unit_log_data_with_root(pp: PrimePower, omega: u64) -> Result<UnitLogData> {
    let (p, m, q) = (pp.p(), pp.m(), pp.q());
    if p == 2 {
        if omega != 5 {
            return domain("the generator for p = 2 is 5");
        }
        let log_modulus = if m >= 2 { 1u64 << (m - 2) } else { 1 };
        let (big_r, rbar) = if m >= 3 {
            let l = padic_log(5, 2, m)?;
            let big_r = (l >> 2) % log_modulus;
            (
                big_r,
                inv_mod(big_r, log_modulus).expect("log 5 / 4 is odd"),
            )
        } else {
            (0, 0)
        };
        return Ok(UnitLogData {
            pp,
            omega,
            r: 1,
            big_r,
            rbar,
            log_modulus,
        });
    }
    let p2 = p * p;
    let primitive = !omega.is_multiple_of(p)
        && factorize(p - 1)
            .iter()
            .all(|&(l, _)| pow_mod(omega, (p - 1) / l, p) != 1)
        && pow_mod(omega, p - 1, p2) != 1;
    if !primitive {
        return domain(format!("{omega} is not a primitive root modulo {p}^2"));
    }
    let w = pow_mod(omega, p - 1, q.max(p2));
    let r = ((w - 1) / p) % q;
    let log_modulus = q / p;
    let (big_r, rbar) = if m >= 2 {
        let l = padic_log(pow_mod(omega, p - 1, q) as i128, p, m)?;
        let big_r = (l / p) % log_modulus;
        (
            big_r,
            inv_mod(big_r, log_modulus).expect("p does not divide r"),
        )
    } else {
        (0, 0)
    };
    Ok(UnitLogData {
        pp,
        omega,
        r,
        big_r,
        rbar,
        log_modulus,
    })
}

/// Exponent record of a unit: `x = (-1)^a omega^k` (for odd `p`, `a = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Dlog {
    pub a: u8,
    pub k: u64,
}

/// Discrete logarithm of a unit with respect to the generators in `data`.
///
/// Odd `p`: `omega^k ≡ x (mod p^m)` with `0 ≤ k < p^{m-1}(p-1)`.
/// `p = 2`: `x ≡ (-1)^a 5^k (mod 2^m)` with `0 ≤ k < 2^{m-2}` (`k = 0` if `m ≤ 2`).
pub fn discrete_decompose(x: i128, data: &UnitLogData) -> Result<Dlog> {
    let pp = data.pp;
    let x = pp.reduce(x);
    if !pp.is_unit(x) {
        return domain(format!("{x} is not a unit modulo {pp}"));
    }
    let q = pp.q();
    if pp.p() == 2 {
        if pp.m() == 1 {
            return Ok(Dlog { a: 0, k: 0 });
        }
        let a = u8::from(x % 4 == 3);
        let y = if a == 1 { q - x } else { x };
        if pp.m() == 2 {
            return Ok(Dlog { a, k: 0 });
        }
        let order = q / 4;
        let k = group_dlog(5, y, order, &[(2, pp.m() - 2)], q);
        return Ok(Dlog { a, k });
    }
    let order = pp.unit_count();
    let mut factors = factorize(pp.p() - 1);
    if pp.m() > 1 {
        factors.push((pp.p(), pp.m() - 1));
    }
    Ok(Dlog {
        a: 0,
        k: group_dlog(data.omega, x, order, &factors, q),
    })
}

/// Discrete log of `h` to base `g` (of exact order `order`) modulo `modulus`,
/// by Pohlig–Hellman with baby-step giant-step, or a direct walk for small
/// moduli.
fn group_dlog(g: u64, h: u64, order: u64, factors: &[(u64, u32)], modulus: u64) -> u64 {
    if modulus <= 10_000 {
        let mut acc = 1u64;
        for k in 0..order {
            if acc == h {
                return k;
            }
            acc = mul_mod(acc, g, modulus);
        }
        panic!("{h} is not a power of {g} modulo {modulus}");
    }
    let mut residues = Vec::with_capacity(factors.len());
    for &(l, e) in factors {
        let le = l.pow(e);
        let cofactor = order / le;
        let gi = pow_mod(g, cofactor, modulus);
        let hi = pow_mod(h, cofactor, modulus);
        let gamma = pow_mod(gi, le / l, modulus);
        let gi_inv = inv_mod(gi, modulus).expect("unit");
        let mut xi = 0u64;
        let mut lk = 1u64;
        for k in 0..e {
            let shifted = mul_mod(pow_mod(gi_inv, xi, modulus), hi, modulus);
            let hk = pow_mod(shifted, le / l / l.pow(k), modulus);
            let d = bsgs(gamma, hk, l, modulus);
            xi += d * lk;
            lk *= l;
        }
        residues.push((xi, le));
    }
    crt(&residues)
}

fn bsgs(g: u64, h: u64, order: u64, modulus: u64) -> u64 {
    let n = (order as f64).sqrt().ceil() as u64 + 1;
    let mut table = HashMap::with_capacity(n as usize);
    let mut acc = 1u64;
    for j in 0..n {
        table.entry(acc).or_insert(j);
        acc = mul_mod(acc, g, modulus);
    }
    let giant = inv_mod(pow_mod(g, n, modulus), modulus).expect("unit");
    let mut gamma = h;
    for i in 0..=n {
        if let Some(&j) = table.get(&gamma) {
            return (i * n + j) % order;
        }
        gamma = mul_mod(gamma, giant, modulus);
    }
    panic!("baby-step giant-step failed: {h} not in the subgroup generated by {g}");
}

fn crt(residues: &[(u64, u64)]) -> u64 {
    let mut x = 0u128;
    let mut m = 1u128;
    for &(r, n) in residues {
        let n = n as u128;
        let inv = inv_mod((m % n) as u64, n as u64).expect("coprime moduli") as u128;
        let diff = (r as u128 + n - (x % n)) % n;
        x += m * ((diff * inv) % n);
        m *= n;
    }
    x as u64
}

/// Table of discrete logarithms of every unit modulo `p^m`, built by walking
/// the powers of the generators. Entries are `a·half + k` for `p = 2` (with
/// `half = 2^{m-2}`) and `k` for odd `p`.
#[derive(Debug, Clone)]
pub struct DlogTable {
    pp: PrimePower,
    half: u64,
    table: Vec<u32>,
}

impl DlogTable {
    pub const MAX_TABLE_MODULUS: u64 = 1 << 26;
    const NON_UNIT: u32 = u32::MAX;

    pub fn new(data: &UnitLogData) -> Result<Self> {
        let pp = data.pp;
        let q = pp.q();
        if q > Self::MAX_TABLE_MODULUS {
            return domain(format!("modulus {pp} too large for a discrete log table"));
        }
        let mut table = vec![Self::NON_UNIT; q as usize];
        let mut half = 0;
        if pp.p() == 2 {
            half = if pp.m() >= 2 { q / 4 } else { 1 };
            let mut s = 1u64;
            for k in 0..half {
                table[s as usize] = k as u32;
                if pp.m() >= 2 {
                    table[(q - s) as usize] = (half + k) as u32;
                }
                s = mul_mod(s, 5, q);
            }
            if pp.m() == 1 {
                table[1] = 0;
            }
        } else {
            let mut s = 1u64;
            for k in 0..pp.unit_count() {
                table[s as usize] = k as u32;
                s = mul_mod(s, data.omega, q);
            }
        }
        Ok(Self { pp, half, table })
    }

    pub fn pp(&self) -> PrimePower {
        self.pp
    }

    /// Packed logarithm of a residue in `[0, q)`, or `None` for non-units.
    #[inline]
    pub fn packed(&self, x: u64) -> Option<u32> {
        let v = self.table[x as usize];
        (v != Self::NON_UNIT).then_some(v)
    }

    pub fn get(&self, x: u64) -> Option<Dlog> {
        let v = self.packed(x % self.pp.q())? as u64;
        Some(if self.pp.p() == 2 {
            Dlog {
                a: u8::from(v >= self.half),
                k: v % self.half,
            }
        } else {
            Dlog { a: 0, k: v }
        })
    }
}

/// Legendre symbol by Euler's criterion.
pub fn legendre(a: i64, p: u64) -> i8 {
    assert!(p > 2, "Legendre symbol needs an odd prime");
    let r = reduce_i128(a as i128, p);
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// `Σ_{x mod p} e_p(x^2)`: `√p` if `p ≡ 1 (mod 4)` and `i√p` otherwise.
pub fn quadratic_gauss_sum(p: u64) -> Complex64 {
    let s = (p as f64).sqrt();
    if p % 4 == 1 {
        Complex64::new(s, 0.0)
    } else {
        Complex64::new(0.0, s)
    }
}

/// The pair `((a/p), 𝒢_p)`.
pub fn gauss_legendre(a: i64, p: u64) -> (i8, Complex64) {
    (legendre(a, p), quadratic_gauss_sum(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(p: u64, m: u32) -> PrimePower {
        PrimePower::new(p, m).unwrap()
    }

    #[test]
    fn prime_power_validation() {
        assert!(PrimePower::new(4, 2).is_err());
        assert!(PrimePower::new(3, 0).is_err());
        assert!(PrimePower::new(2, 63).is_err());
        assert_eq!(pp(5, 3).q(), 125);
        assert_eq!(pp(7, 2).unit_count(), 42);
    }

    #[test]
    fn log_examples() {
        assert_eq!(padic_log(1, 5, 3).unwrap(), 0);
        assert_eq!(padic_log(6, 5, 3).unwrap(), 55);
        assert_eq!(padic_log(36, 5, 3).unwrap(), 110);
        assert_eq!(padic_log(4, 3, 3).unwrap(), 21);
        assert!(padic_log(2, 5, 3).is_err());
        assert!(padic_log(3, 2, 4).is_err());
    }

    #[test]
    fn log_depends_only_on_residue() {
        for x in (1..125).step_by(5) {
            assert_eq!(
                padic_log(x, 5, 3).unwrap(),
                padic_log(x + 125 * 7, 5, 3).unwrap()
            );
        }
    }

    #[test]
    fn unit_log_examples() {
        let d = unit_log_data(pp(3, 3));
        assert_eq!((d.omega, d.r, d.big_r, d.rbar), (2, 1, 7, 4));
        let d = unit_log_data(pp(5, 2));
        assert_eq!((d.omega, d.r), (2, 3));
        let d = unit_log_data(pp(2, 6));
        assert_eq!(d.r2(), Some(15));
        assert_eq!(mul_mod(d.big_r, d.rbar, 16), 1);
    }

    #[test]
    fn decompose_examples() {
        let d = unit_log_data(pp(3, 2));
        assert_eq!(discrete_decompose(1, &d).unwrap(), Dlog { a: 0, k: 0 });
        assert_eq!(discrete_decompose(4, &d).unwrap(), Dlog { a: 0, k: 2 });
        let d = unit_log_data(pp(2, 4));
        assert_eq!(discrete_decompose(1, &d).unwrap(), Dlog { a: 0, k: 0 });
        assert_eq!(discrete_decompose(3, &d).unwrap(), Dlog { a: 1, k: 3 });
        assert!(discrete_decompose(6, &d).is_err());
    }

    #[test]
    fn pohlig_hellman_matches_table_on_large_modulus() {
        for (p, m) in [(3u64, 9u32), (5, 6), (2, 16), (101, 2)] {
            let data = unit_log_data(pp(p, m));
            let table = DlogTable::new(&data).unwrap();
            for x in [2u64, 3, 7, 11, 1234, 9999, 10007]
                .into_iter()
                .filter(|x| x % p != 0)
            {
                assert_eq!(
                    discrete_decompose(x as i128, &data).unwrap(),
                    table.get(x).unwrap(),
                    "{x} mod {p}^{m}"
                );
            }
        }
    }

    #[test]
    fn gauss_examples() {
        assert_eq!(gauss_legendre(2, 5).0, -1);
        assert!((gauss_legendre(1, 5).1 - Complex64::new(5f64.sqrt(), 0.0)).norm() < 1e-15);
        assert!((gauss_legendre(1, 7).1 - Complex64::new(0.0, 7f64.sqrt())).norm() < 1e-15);
        assert_eq!(legendre(0, 7), 0);
    }
}
