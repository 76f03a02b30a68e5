use num_bigint::BigInt;

use super::reduce::{p_power, summand_root};
use super::value::SumValue;
use crate::charmod::MultChar;
use crate::critical::{critical_profile, hensel_lift};
use crate::error::{domain, Result};
use crate::padic::{inv_mod, mul_mod};
use crate::polyrat::{taylor_series, RatFunc};

/// Closed-form `S_α` at a critical point of multiplicity one.
#[derive(Clone, Debug, PartialEq)]
pub struct MultOneValue {
    /// `|S_α|`.
    pub magnitude: f64,
    /// The exact value (odd `p`); `p = 2` yields the magnitude only.
    pub value: Option<SumValue>,
    /// The lifted critical point `α*` modulo `p^m` (odd `p`).
    pub lift: Option<u64>,
}

/// `S_α(χ, g, f, p^m)` for a critical `α` with `ν = 1`.
///
/// With `α*` the lift of `α` to a zero of `𝒞` mod `p^m` and `k = m - t - 2`,
/// the value is `p^{(m+t)/2} χ(g(α*)) e_{p^m}(f(α*))` for even `k`, and
/// `p^{(m+t-1)/2} χ(g(α*)) e_{p^m}(f(α*)) Σ_{y mod p} e_p(A y² + B y)` for odd
/// `k`, where `A = 𝒞'(α*)/2` and `B = 0` except for `p = 3`, `k = 1`, where
/// `B = 𝒞''(α*)/2` carries the cubic term of the local expansion.
pub fn eval_mult_one(f: &RatFunc, g: &RatFunc, chi: &MultChar, alpha: u64) -> Result<MultOneValue> {
    let pp = chi.pp();
    let (p, m) = (pp.p(), pp.m());
    let Some(profile) = critical_profile(f, g, chi)? else {
        return domain("the phase is constant");
    };
    let t = profile.t;
    let Some(cp) = profile.point(alpha % p) else {
        return domain(format!("{alpha} is not a critical point"));
    };
    if cp.nu != 1 {
        return domain(format!("critical point {alpha} has multiplicity {}", cp.nu));
    }
    if p == 2 {
        if m < t + 5 {
            return domain("p = 2 needs m ≥ t + 5");
        }
        return Ok(MultOneValue {
            magnitude: 2f64.powf((m + t) as f64 / 2.0),
            value: None,
            lift: None,
        });
    }
    if m < t + 2 {
        return domain("the modulus is too small relative to t");
    }
    if profile.c.den().eval_mod(cp.alpha, p) == 0 {
        return domain("the critical point function has a pole at the critical point");
    }
    let lift = hensel_lift(&profile.c, cp.alpha, p, m)?;
    let phase = summand_root(f, g, chi, lift)
        .ok_or_else(|| crate::Error::Domain("critical point outside the domain".into()))?;
    let k = m - t - 2;
    if k % 2 == 0 {
        let value = SumValue::single(phase, p_power(p, (m + t) / 2));
        return Ok(MultOneValue {
            magnitude: value.magnitude(),
            value: Some(value),
            lift: Some(lift),
        });
    }
    let taylor = taylor_series(&profile.c, &BigInt::from(lift), &BigInt::from(1), p, 1, 3)?;
    let half = inv_mod(2, p).expect("odd p");
    let a = mul_mod(taylor.coeff(1), half, p);
    let b = if p == 3 && k == 1 { taylor.coeff(2) } else { 0 };
    let gauss = SumValue::from_sparse(
        p,
        (0..p)
            .map(|y| ((mul_mod(a, mul_mod(y, y, p), p) + mul_mod(b, y, p)) % p, 1))
            .collect(),
    );
    let value = gauss.mul_root(phase).scale(p_power(p, (m + t - 1) / 2));
    Ok(MultOneValue {
        magnitude: value.magnitude(),
        value: Some(value),
        lift: Some(lift),
    })
}
