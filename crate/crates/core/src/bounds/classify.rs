use std::cell::RefCell;

use num_bigint::BigInt;
use serde::Serialize;

use crate::charmod::MultChar;
use crate::error::{Error, Result};
use crate::evaluate::ResidueMask;
use crate::padic::ord_p;
use crate::polyrat::{rth_power_test, IntPoly, RatFunc};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ClassKind {
    NonDegenerate,
    Degenerate,
    ConstantOnDomain,
}

/// The translate-and-split data of a degenerate sum.
///
/// With `s` the shift, `f(X+s) = f(s) + p^{ℓ_f} F(X)` and
/// `g(X+s) = g(s)(1 + p^{ℓ_g} G(X))`; when `ℓ_g > 0`,
/// `H = p^{ℓ_f} F + c_χ Σ_{j ≤ J} (-1)^{j-1} p^{jℓ_g} G^j / j` (for `p = 2`,
/// `ℓ_g = 1` and `κ = 1` the term `2^{m-1} G` is added, which accounts for
/// `χ(-1)` on the classes where `1 + 2G ≡ 3 mod 4`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub shift: u64,
    pub l_f: u32,
    pub l_g: u32,
    pub f_part: RatFunc,
    pub g_part: RatFunc,
    pub f_shifted: RatFunc,
    pub g_shifted: RatFunc,
    /// `f(s)` and `g(s)` as rational constants.
    pub f0: RatFunc,
    pub g0: RatFunc,
    pub h: Option<RatFunc>,
    pub l: u32,
    pub j: Option<u32>,
    pub big_l: Option<u32>,
    /// `deg_p(p^{-ℓ} H)` when `ℓ_g > 0` and `ℓ < m`.
    pub d_p: Option<usize>,
    /// Whether `H` carries the `2^{m-1} G` sign term.
    pub sign_term: bool,
    pub t_chi: u32,
    pub m: u32,
}

impl Decomposition {
    pub fn is_constant(&self) -> bool {
        self.l >= self.m
    }

    /// `p^{-ℓ} H` (when `ℓ_g > 0`).
    pub fn scaled_h(&self, p: u64) -> Option<RatFunc> {
        self.h.as_ref().map(|h| h.mul_p_pow(p, -(self.l as i64)))
    }

    /// The estimate `deg(F) + (ℓ - t_χ)/ℓ_g · p/(p-1) · deg(G)`.
    pub fn dp_upper_estimate(&self, p: u64) -> Option<f64> {
        (self.l_g > 0).then(|| {
            self.f_part.deg() as f64
                + (self.l as f64 - self.t_chi as f64) / self.l_g as f64 * p as f64
                    / (p as f64 - 1.0)
                    * self.g_part.deg() as f64
        })
    }
}

/// Classification with the decomposition of degenerate sums.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub kind: ClassKind,
    pub decomposition: Option<Decomposition>,
}

fn constant_value(f: &RatFunc) -> RatFunc {
    RatFunc::ratio(f.num().coeff(0), f.den().coeff(0)).expect("denominator nonzero at 0")
}

/// Splits `h` as `p^ℓ H` with `p ∤ H`; zero or `ℓ ≥ m` gives `(m, X)`.
fn split_valuation(h: &RatFunc, p: u64, m: u32) -> (u32, RatFunc) {
    match h.ord_p(p) {
        Some(o) if o < m as i64 => {
            assert!(o >= 0, "negative valuation after translation");
            (o as u32, h.mul_p_pow(p, -o))
        }
        _ => (m, RatFunc::x()),
    }
}

/// Smallest `s ∈ [0, p)` in the domain (and the mask, if any).
pub fn first_residue(f: &RatFunc, g: &RatFunc, p: u64, mask: Option<&ResidueMask>) -> Option<u64> {
    (0..p).find(|&s| crate::evaluate::in_domain(f, g, p, s) && mask.is_none_or(|mk| mk[s as usize]))
}

/// Classifies `S(χ, g, f, p^m)`.
pub fn classify(f: &RatFunc, g: &RatFunc, chi: &MultChar) -> Result<Classification> {
    classify_masked(f, g, chi, None)
}

pub(crate) fn classify_masked(
    f: &RatFunc,
    g: &RatFunc,
    chi: &MultChar,
    mask: Option<&ResidueMask>,
) -> Result<Classification> {
    let pp = chi.pp();
    let (p, m) = (pp.p(), pp.m());
    if f.ord_p(p).is_some_and(|o| o < 0)
        || g.ord_p(p) != Some(0)
        || first_residue(f, g, p, mask).is_none()
    {
        return Err(Error::EmptySum);
    }
    let plain = |kind| {
        Ok(Classification {
            kind,
            decomposition: None,
        })
    };
    if f.is_constant() && g.is_constant() {
        return plain(ClassKind::ConstantOnDomain);
    }
    let deg_f = f.deg_p(p).expect("p-integral");
    if m == 1 {
        let r = chi.order() as u32;
        return if deg_f == 0 && rth_power_test(g, r, p).is_some() {
            plain(ClassKind::ConstantOnDomain)
        } else {
            plain(ClassKind::NonDegenerate)
        };
    }
    let deg_g = g.deg_p(p).expect("unit valuation");
    if deg_f >= 1 || (deg_g >= 1 && chi.is_primitive()) {
        return plain(ClassKind::NonDegenerate);
    }
    let dec = decompose(f, g, chi, mask)?;
    let kind = if dec.is_constant() {
        ClassKind::ConstantOnDomain
    } else {
        ClassKind::Degenerate
    };
    Ok(Classification {
        kind,
        decomposition: Some(dec),
    })
}

/// `J`: the largest `j` with `j ℓ_g - ord_p(j) < m` (so all later log terms vanish mod `p^m`).
pub fn truncation_j(p: u64, l_g: u32, m: u32) -> u32 {
    let scan = m / l_g.max(1) + 64;
    (1..=scan)
        .filter(|&j| (j * l_g) < m + ord_p(j as u64, p))
        .max()
        .unwrap_or(1)
}

/// `L`: minimal positive integer with `j ℓ_g + t_χ - ord_p(j) > ℓ` for all `j > L`.
pub fn truncation_l(p: u64, l_g: u32, t_chi: u32, l: u32) -> u32 {
    let scan = l / l_g.max(1) + 64;
    (1..=scan)
        .filter(|&j| j * l_g + t_chi <= l + ord_p(j as u64, p))
        .max()
        .unwrap_or(1)
}

/// The decomposition of a sum with `deg_p f = 0`.
pub fn decompose(
    f: &RatFunc,
    g: &RatFunc,
    chi: &MultChar,
    mask: Option<&ResidueMask>,
) -> Result<Decomposition> {
    let pp = chi.pp();
    let (p, m) = (pp.p(), pp.m());
    let shift = first_residue(f, g, p, mask).ok_or(Error::EmptySum)?;
    let s = BigInt::from(shift);
    let one = BigInt::from(1);
    let f_shifted = f.affine(&s, &one);
    let g_shifted = g.affine(&s, &one);
    let f0 = constant_value(&f_shifted);
    let g0 = constant_value(&g_shifted);
    let (l_f, f_part) = split_valuation(&f_shifted.sub(&f0), p, m);
    let (l_g, g_part) = split_valuation(&g_shifted.div(&g0)?.sub(&RatFunc::one()), p, m);
    let t_chi = chi.t_chi();
    let mut dec = Decomposition {
        shift,
        l_f,
        l_g,
        f_part,
        g_part,
        f_shifted,
        g_shifted,
        f0,
        g0,
        h: None,
        l: 0,
        j: None,
        big_l: None,
        d_p: None,
        sign_term: false,
        t_chi,
        m,
    };
    if l_g == 0 {
        let r = chi.order() as u32;
        dec.l = if l_f >= m && t_chi + 1 == m && rth_power_test(g, r, p).is_some() {
            m
        } else {
            l_f.min(t_chi)
        };
        return Ok(dec);
    }
    let j_max = truncation_j(p, l_g, m);
    let c = BigInt::from(chi.c_chi());
    let pg = dec.g_part.mul_p_pow(p, l_g as i64);
    let mut h = dec.f_part.mul_p_pow(p, l_f as i64);
    let mut power = RatFunc::one();
    for j in 1..=j_max {
        power = power.mul(&pg);
        let sign = if j % 2 == 1 { 1 } else { -1 };
        let coeff = RatFunc::ratio(c.clone() * sign, BigInt::from(j))?;
        h = h.add(&power.mul(&coeff));
    }
    if p == 2 && l_g == 1 && chi.kappa() == 1 {
        h = h.add(&dec.g_part.mul_p_pow(2, m as i64 - 1));
        dec.sign_term = true;
    }
    dec.l = match h.ord_p(p) {
        Some(o) if o < m as i64 => o as u32,
        _ => m,
    };
    dec.j = Some(j_max);
    dec.big_l = Some(truncation_l(p, l_g, t_chi, dec.l));
    if dec.l < m {
        dec.d_p = h.mul_p_pow(p, -(dec.l as i64)).deg_p(p);
    }
    dec.h = Some(h);
    Ok(dec)
}

type DimensionMemo = (RatFunc, RatFunc, (u64, u64));

/// `(D, Δ)`: `D = deg f + 𝒵(f₋ g₊ g₋)`; `Δ = deg f + deg g` for polynomial
/// `f, g`, else `2 deg f + 2 deg g`.
pub fn dimension_params(f: &RatFunc, g: &RatFunc) -> Result<(u64, u64)> {
    thread_local! {
        static LAST: RefCell<Option<DimensionMemo>> = const { RefCell::new(None) };
    }
    if f.is_constant() && g.is_constant() {
        return Err(Error::Domain("f and g are both constant".into()));
    }
    if let Some(hit) = LAST.with_borrow(|last| {
        last.as_ref()
            .filter(|(lf, lg, _)| lf == f && lg == g)
            .map(|l| l.2)
    }) {
        return Ok(hit);
    }
    let dims = compute_dimension_params(f, g)?;
    LAST.set(Some((f.clone(), g.clone(), dims)));
    Ok(dims)
}

fn compute_dimension_params(f: &RatFunc, g: &RatFunc) -> Result<(u64, u64)> {
    let prod: IntPoly = &(f.den() * g.num()) * g.den();
    let z = prod.distinct_zeros()? as u64;
    let (df, dg) = (f.deg() as u64, g.deg() as u64);
    let delta = if f.is_polynomial() && g.is_polynomial() {
        df + dg
    } else {
        2 * df + 2 * dg
    };
    Ok((df + z, delta))
}
