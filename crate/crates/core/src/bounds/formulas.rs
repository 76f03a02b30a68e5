use serde::Serialize;

use crate::bounds::Decomposition;
use crate::charmod::MultChar;
use crate::critical::CriticalProfile;
use crate::evaluate::in_domain;
use crate::padic::PrimePower;
use crate::polyrat::RatFunc;

/// A named estimate; `value` is `None` when its hypotheses fail.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NamedBound {
    pub name: &'static str,
    pub value: Option<f64>,
}

impl NamedBound {
    fn new(name: &'static str, value: Option<f64>) -> Self {
        Self { name, value }
    }
}

/// Constants that change between odd `p` and `p = 2`.
#[derive(Clone, Copy, Debug)]
struct Consts {
    three: f64,
    clean: f64,
    laurent_poly: f64,
    laurent_rat: f64,
}

fn consts(p: u64) -> Consts {
    let c53 = 2f64.powf(5.0 / 3.0);
    let clean = if p == 2 {
        c53 * 3f64.cbrt()
    } else {
        3f64.powf(4.0 / 3.0)
    };
    if p == 2 {
        Consts {
            three: c53,
            clean,
            laurent_poly: 2f64.powf(8.0 / 3.0),
            laurent_rat: clean,
        }
    } else {
        Consts {
            three: 3.0,
            clean,
            laurent_poly: 6.0,
            laurent_rat: clean,
        }
    }
}

/// `c · p^{(a + m(k-1))/k}`, i.e. `c · p^{a/k} p^{m(1-1/k)}`.
pub fn scaled_power(c: f64, p: u64, a: u32, m: u32, k: u64) -> f64 {
    let k = k.max(1) as f64;
    c * (p as f64).powf((a as f64 + m as f64 * (k - 1.0)) / k)
}

fn root(x: usize, k: u64) -> f64 {
    (x as f64).powf(1.0 / k.max(1) as f64)
}

/// `max{c·d^{1/k}, d^{2/k}}` (the second term is dropped for `p = 2`).
fn max_form(c: f64, d: usize, k: u64, p: u64) -> f64 {
    let a = c * root(d, k);
    if p == 2 {
        a
    } else {
        a.max(root(d, k).powi(2))
    }
}

/// `(D-1)√p` when `p > D`, and `1.75 p^{1-1/D}`.
pub fn weil_bounds(p: u64, d: u64) -> (Option<f64>, f64) {
    let sharp = (p > d).then(|| (d.saturating_sub(1)) as f64 * (p as f64).sqrt());
    (sharp, scaled_power(1.75, p, 0, 1, d))
}

/// Estimates for a non-degenerate sum from the degrees of `f`, `g` and `D`, `Δ`.
pub fn nondegen_bound(
    f: &RatFunc,
    g: &RatFunc,
    chi: &MultChar,
    d: u64,
    delta: u64,
) -> Vec<NamedBound> {
    let pp = chi.pp();
    let (p, m) = (pp.p(), pp.m());
    let k = consts(p);
    let deg_f = f.deg_p(p).unwrap_or(0);
    let deg_g = g.deg_p(p).unwrap_or(0);
    let (weil, weil_uniform) = if m == 1 {
        weil_bounds(p, d)
    } else {
        (None, 0.0)
    };
    let g_side = chi.is_primitive() && deg_g >= 1;
    let full_domain = (0..p).all(|x| in_domain(f, g, p, x));
    vec![
        NamedBound::new("weil", weil),
        NamedBound::new("weil_uniform", (m == 1).then_some(weil_uniform)),
        NamedBound::new(
            "main_f",
            (deg_f >= 1).then(|| scaled_power(k.three * root(deg_f, d), p, 0, m, d)),
        ),
        NamedBound::new(
            "main_g",
            g_side.then(|| scaled_power(max_form(k.three, deg_g, d, p), p, 0, m, d)),
        ),
        NamedBound::new(
            "clean_f",
            (deg_f >= 1).then(|| scaled_power(k.clean, p, 0, m, d)),
        ),
        NamedBound::new(
            "clean_g",
            g_side.then(|| scaled_power(k.clean, p, 0, m, delta)),
        ),
        NamedBound::new(
            "cor_maincor2p2",
            (p == 2 && full_domain)
                .then(|| scaled_power(k.three * root(d as usize, d), p, 0, m, d)),
        ),
    ]
}

/// Per-residue estimate at an in-domain critical point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LocalBound {
    pub alpha: u64,
    pub nu: u32,
    pub value: f64,
}

/// Critical-point estimates and their aggregates.
#[derive(Clone, Debug, PartialEq)]
pub struct StructuredBounds {
    pub local: Vec<LocalBound>,
    pub bounds: Vec<NamedBound>,
}

/// Critical points of the profile lying in the domain of `(f, g)`.
pub fn in_domain_points(
    profile: &CriticalProfile,
    f: &RatFunc,
    g: &RatFunc,
    p: u64,
) -> Vec<(u64, u32)> {
    profile
        .points
        .iter()
        .filter(|cp| in_domain(f, g, p, cp.alpha))
        .map(|cp| (cp.alpha, cp.nu))
        .collect()
}

/// Local bound for `|S_α|` at a critical point of multiplicity `ν`, when `m` is
/// large enough relative to `t`.
pub fn local_bound(p: u64, m: u32, t: u32, nu: u32) -> Option<f64> {
    let pf = p as f64;
    if p == 2 {
        if m < t + 3 {
            return None;
        }
        let general = scaled_power(2f64.powf(5.0 / 3.0), 2, t, m, u64::from(nu) + 1);
        if nu != 1 {
            return Some(general);
        }
        let exact = if m >= t + 5 {
            pf.powf((m + t) as f64 / 2.0)
        } else {
            pf.powf((m + t + 1) as f64 / 2.0)
        };
        return Some(general.min(exact));
    }
    if m < t + 2 {
        return None;
    }
    Some(if nu == 1 {
        pf.powf((m + t) as f64 / 2.0)
    } else {
        scaled_power(1.75, p, t, m, u64::from(nu) + 1)
    })
}

/// Estimates built from `t`, the critical points and `deg_p 𝒞₊`.
pub fn structured_bound(
    profile: &CriticalProfile,
    f: &RatFunc,
    g: &RatFunc,
    pp: PrimePower,
    d: u64,
) -> StructuredBounds {
    let (p, m, t) = (pp.p(), pp.m(), profile.t);
    let sharp = if p == 2 { m >= t + 3 } else { m >= t + 2 };
    let local: Vec<LocalBound> = if sharp {
        in_domain_points(profile, f, g, p)
            .into_iter()
            .map(|(alpha, nu)| LocalBound {
                alpha,
                nu,
                value: local_bound(p, m, t, nu).expect("m large enough"),
            })
            .collect()
    } else {
        Vec::new()
    };
    let dc = profile.deg_p_numerator(p) as u64;
    let local_sum = sharp.then(|| local.iter().map(|b| b.value).sum());
    let (cor1, m2, p21) = if p == 2 {
        (
            None,
            None,
            sharp.then(|| scaled_power(2f64.powf(5.0 / 3.0), 2, t, m, dc + 1)),
        )
    } else {
        let m2 = if m <= t + 1 {
            scaled_power(1.0, p, t + 1, m, d)
        } else {
            scaled_power(3.0, p, t, m, d)
        };
        (
            sharp.then(|| scaled_power(3.0, p, t, m, dc + 1)),
            Some(m2),
            None,
        )
    };
    StructuredBounds {
        local,
        bounds: vec![
            NamedBound::new("local", local_sum),
            NamedBound::new("cor_maincor1", cor1),
            NamedBound::new("cor_m2", m2),
            NamedBound::new("cor_maincorp21", p21),
        ],
    }
}

/// Pure-sum estimates: the `λ`/`β_j` form and the uniform `1.75` form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PureBound {
    pub sharp: f64,
    pub uniform: f64,
}

/// `λ = p^{2/(p+1)}`.
pub fn lambda(p: u64) -> f64 {
    (p as f64).powf(2.0 / (p as f64 + 1.0))
}

/// The constant multiplying the pure-sum bound for `d₁ = j`.
pub fn beta(p: u64, j: u64) -> f64 {
    let pf = p as f64;
    if p <= 13 {
        return lambda(p);
    }
    if (j as f64) < pf.sqrt() {
        pf.powf(1.0 / (pf.sqrt() + 1.0))
    } else if 2 * j <= p - 3 {
        pf.powf(1.0 / (j as f64 + 1.0))
    } else {
        lambda(p)
    }
}

/// `t = ord_p f'` and `d₁ = deg_p(p^{-t} f')` for a polynomial `f`.
pub fn pure_params(f: &RatFunc, p: u64) -> Option<(u32, u64)> {
    if !f.is_polynomial() || f.is_constant() {
        return None;
    }
    let fp = f.derivative();
    let t = fp.ord_p(p)?;
    let t = u32::try_from(t).ok()?;
    let d1 = fp.mul_p_pow(p, -(t as i64)).deg_p(p)? as u64;
    Some((t, d1))
}

/// Pure exponential sum bound for `S(f, p^m)` with the given `t` and `d₁`.
pub fn pure_bound(p: u64, m: u32, t: u32, d1: u64) -> Option<PureBound> {
    let margin = if p == 2 { 3 } else { 2 };
    if m < t + margin {
        return None;
    }
    Some(PureBound {
        sharp: scaled_power(beta(p, d1), p, t, m, d1 + 1),
        uniform: scaled_power(1.75, p, t, m, d1 + 1),
    })
}

fn constant_coeff(h: &RatFunc) -> Option<RatFunc> {
    let l = h.laurent()?;
    let idx = usize::try_from(-l.low).ok();
    let c = idx
        .and_then(|i| l.coeffs.get(i).cloned())
        .unwrap_or_default();
    RatFunc::ratio(c, l.denom).ok()
}

fn valuation_or(h: &RatFunc, p: u64, m: u32) -> u32 {
    match h.ord_p(p) {
        Some(o) if o < i64::from(m) => o.max(0) as u32,
        _ => m,
    }
}

/// Whether the Laurent refinement applies: `f`, `g` are Laurent polynomials,
/// `g = b(1 + p^{ℓ_g} G)` with a unit constant term `b`, the same `ℓ_f`, `ℓ_g`
/// as the decomposition, and the extreme coefficient of `G` is a unit.
pub fn laurent_applies(f: &RatFunc, g: &RatFunc, dec: &Decomposition, p: u64) -> bool {
    if dec.l_g == 0 || dec.is_constant() || f.laurent().is_none() {
        return false;
    }
    let Some(b) = constant_coeff(g) else {
        return false;
    };
    if b.ord_p(p) != Some(0) {
        return false;
    }
    let Some(a) = constant_coeff(f) else {
        return false;
    };
    if valuation_or(&f.sub(&a), p, dec.m) != dec.l_f {
        return false;
    }
    let Ok(ratio) = g.div(&b) else { return false };
    let g0 = ratio.sub(&RatFunc::one());
    if valuation_or(&g0, p, dec.m) != dec.l_g || dec.l_g >= dec.m {
        return false;
    }
    let Some(lg) = g0.mul_p_pow(p, -i64::from(dec.l_g)).laurent() else {
        return false;
    };
    let (d1, d2) = (lg.low, lg.high());
    let extreme = if d2.abs() >= d1.abs() { d2 } else { d1 };
    lg.coeff_is_unit(extreme, p)
}

/// Estimates for a degenerate sum from its decomposition.
pub fn degen_bound(
    dec: &Decomposition,
    f: &RatFunc,
    g: &RatFunc,
    pp: PrimePower,
    d: u64,
    delta: u64,
) -> Vec<NamedBound> {
    let (p, m, l) = (pp.p(), pp.m(), dec.l);
    let k = consts(p);
    let live = !dec.is_constant();
    let pure_g = dec.l_g == 0;
    let form = |c: f64, e: u64| scaled_power(c, p, l, m, e);
    let deg_big_f = dec.f_part.deg_p(p).unwrap_or(0);
    let deg_g = g.deg_p(p).unwrap_or(0);
    let prop_f = (live && pure_g && l == dec.l_f && deg_big_f >= 1)
        .then(|| form(k.three * root(deg_big_f, d), d));
    let prop_g = (live && pure_g && l == dec.t_chi && deg_g >= 1)
        .then(|| form(max_form(k.three, deg_g, d, p), d));
    let dp = dec.d_p.filter(|&x| x >= 1);
    let prop_h = dp
        .filter(|_| live && !pure_g)
        .map(|x| form(max_form(k.three, x, d, p), d));
    let ii = dp
        .filter(|_| live && !pure_g)
        .map(|x| form(max_form(k.three, x, delta, p), delta));
    let laurent = (live && laurent_applies(f, g, dec, p)).then(|| {
        let c = if f.is_polynomial() && g.is_polynomial() {
            k.laurent_poly
        } else {
            k.laurent_rat
        };
        form(c, delta)
    });
    vec![
        NamedBound::new("degen_i", (live && pure_g).then(|| form(k.clean, delta))),
        NamedBound::new("degen_ii", ii),
        NamedBound::new("degen_prop_f", prop_f),
        NamedBound::new("degen_prop_g", prop_g),
        NamedBound::new("degen_prop_h", prop_h),
        NamedBound::new("laurent", laurent),
    ]
}
