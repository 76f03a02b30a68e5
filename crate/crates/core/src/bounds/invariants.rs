//! Structural relations between `t`, the decomposition and the degrees,
//! checked on concrete inputs.

use super::Decomposition;
use crate::charmod::MultChar;
use crate::critical::CriticalProfile;
use crate::polyrat::RatFunc;

/// `p^t | deg_p f` and `p^t | c_χ deg_p g` (zero counts as divisible).
pub fn t_divides_degrees(f: &RatFunc, g: &RatFunc, chi: &MultChar, t: u32) -> bool {
    let p = chi.pp().p();
    let divisible = |n: u128| n == 0 || ord_p_u128(n, p) >= t;
    let deg_f = f.deg_p(p).unwrap_or(0) as u128;
    let deg_g = g.deg_p(p).unwrap_or(0) as u128;
    divisible(deg_f) && divisible(u128::from(chi.c_chi()) * deg_g)
}

fn ord_p_u128(mut n: u128, p: u64) -> u32 {
    let p = u128::from(p);
    let mut k = 0;
    while n.is_multiple_of(p) {
        n /= p;
        k += 1;
    }
    k
}

/// `deg_p 𝒞₊ ≤ D - 1`.
pub fn critical_degree_ok(profile: &CriticalProfile, p: u64, d: u64) -> bool {
    (profile.deg_p_numerator(p) as u64) < d.max(1)
}

/// `p^{min(t,m) - ℓ} ≤ d_p`, and `d_p ≤ D` when `p > d_p`; `None` unless
/// the decomposition has `ℓ_g > 0` and `ℓ < m`.
///
/// The sign term `2^{m-1} G` only matches `H' = 2^t 𝒞` modulo `2^{m-1}`, so
/// `m` is lowered by one when it is present.
pub fn dp_relations(dec: &Decomposition, p: u64, t: u32, d: u64) -> Option<(bool, bool)> {
    let dp = dec.d_p? as u64;
    if dec.l_g == 0 || dec.is_constant() {
        return None;
    }
    let cap = if dec.sign_term { dec.m - 1 } else { dec.m };
    let e = t.min(cap).saturating_sub(dec.l);
    let lower = p.checked_pow(e).is_some_and(|v| v <= dp);
    let upper = p <= dp || dp <= d;
    Some((lower, upper))
}

/// `(ℓ - t_χ)/ℓ_g - 1 < L ≤ (ℓ - t_χ)/ℓ_g · p/(p-1)` when `ℓ_f = ℓ_g + t_χ`.
///
/// Skipped modulo 4, where `c_χ` is only defined modulo 1 and its valuation
/// need not equal `t_χ`.
pub fn l_squeeze(dec: &Decomposition, p: u64) -> Option<bool> {
    let big_l = dec.big_l?;
    if dec.l_g == 0 || dec.is_constant() || dec.l_f != dec.l_g + dec.t_chi || (p == 2 && dec.m <= 2)
    {
        return None;
    }
    let x = (f64::from(dec.l) - f64::from(dec.t_chi)) / f64::from(dec.l_g);
    let l = f64::from(big_l);
    Some(x - 1.0 < l && l <= x * p as f64 / (p as f64 - 1.0) + 1e-12)
}
