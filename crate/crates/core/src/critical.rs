//! The critical point function `𝒞 = p^{-t}(f' + c_χ g'/g)`, its zeros modulo
//! `p`, and the local power series `F_α`, `G_α`, `H_α` at each critical point.

use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::BigInt;
use serde::Serialize;

use crate::charmod::MultChar;
use crate::error::{domain, Result};
use crate::padic::{self, inv_mod, mul_mod, ord_p, PrimePower};
use crate::polyrat::{series_log1p, taylor_series, IntPoly, PSeries, RatFunc};

/// Outcome of forming `f' + c_χ g'/g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CriticalFunction {
    /// `t = ord_p(f' + c_χ g'/g)` and `𝒞 = p^{-t}(f' + c_χ g'/g)`.
    Profile { t: u32, c: RatFunc },
    /// `f' + c_χ g'/g` vanishes identically.
    ConstantPhase,
}

/// Precomputed `f'` and `g'/g`, reused across characters.
#[derive(Clone, Debug)]
pub struct CriticalBase {
    fprime: RatFunc,
    log_deriv: RatFunc,
}

impl CriticalBase {
    pub fn new(f: &RatFunc, g: &RatFunc) -> Result<Self> {
        if g.is_zero() {
            return domain("g must be nonzero");
        }
        Ok(Self {
            fprime: f.derivative(),
            log_deriv: g.derivative().div(g)?,
        })
    }

    /// Forms `f' + c_χ g'/g` with the integer representative `c_chi`.
    pub fn with_c_chi(&self, c_chi: u64, p: u64) -> Result<CriticalFunction> {
        let h = if self.log_deriv.is_zero() {
            self.fprime.clone()
        } else {
            self.fprime.add(&self.log_deriv.scale(&BigInt::from(c_chi)))
        };
        let Some(t) = h.ord_p(p) else {
            return Ok(CriticalFunction::ConstantPhase);
        };
        if t < 0 {
            return domain(
                "f' + c g'/g has negative valuation; check ord_p(f) ≥ 0 and ord_p(g) = 0",
            );
        }
        Ok(CriticalFunction::Profile {
            t: t as u32,
            c: h.mul_p_pow(p, -t),
        })
    }
}

/// Critical data for the most recent `(f, g)` seen on this thread.
struct Memo {
    f: RatFunc,
    g: RatFunc,
    base: CriticalBase,
    functions: HashMap<(u64, u64), CriticalFunction>,
    profiles: HashMap<(u64, u64), Option<CriticalProfile>>,
}

thread_local! {
    static MEMO: RefCell<Option<Memo>> = const { RefCell::new(None) };
}

fn with_memo<T>(f: &RatFunc, g: &RatFunc, run: impl FnOnce(&mut Memo) -> Result<T>) -> Result<T> {
    MEMO.with_borrow_mut(|slot| {
        if !slot.as_ref().is_some_and(|m| m.f == *f && m.g == *g) {
            let base = CriticalBase::new(f, g)?;
            *slot = Some(Memo {
                f: f.clone(),
                g: g.clone(),
                base,
                functions: HashMap::new(),
                profiles: HashMap::new(),
            });
        }
        run(slot.as_mut().expect("memo just filled"))
    })
}

/// `t` and `𝒞` for `f, g` and the character's `c_χ`.
pub fn t_and_c(f: &RatFunc, g: &RatFunc, c_chi: u64, p: u64) -> Result<CriticalFunction> {
    with_memo(f, g, |memo| {
        if let Some(hit) = memo.functions.get(&(c_chi, p)) {
            return Ok(hit.clone());
        }
        let cf = memo.base.with_c_chi(c_chi, p)?;
        memo.functions.insert((c_chi, p), cf.clone());
        Ok(cf)
    })
}

/// The profile for `c_χ` modulo `p`, or `None` when the phase is constant.
pub fn profile_for(
    f: &RatFunc,
    g: &RatFunc,
    c_chi: u64,
    p: u64,
) -> Result<Option<CriticalProfile>> {
    if let Some(hit) = with_memo(f, g, |memo| Ok(memo.profiles.get(&(c_chi, p)).cloned()))? {
        return Ok(hit);
    }
    let profile = match t_and_c(f, g, c_chi, p)? {
        CriticalFunction::Profile { t, c } => Some(CriticalProfile::new(t, c, p)),
        CriticalFunction::ConstantPhase => None,
    };
    with_memo(f, g, |memo| {
        memo.profiles.insert((c_chi, p), profile.clone());
        Ok(profile)
    })
}

/// A zero `α` of `𝒞` modulo `p` with multiplicity `ν`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CriticalPoint {
    pub alpha: u64,
    pub nu: u32,
}

/// Zeros of `𝒞` mod `p` read from the reduced fraction over `𝔽_p`.
pub fn critical_set(c: &RatFunc, p: u64) -> Vec<CriticalPoint> {
    let Some((num, den)) = c.reduce_mod_p(p) else {
        return Vec::new();
    };
    if num.is_zero() {
        return Vec::new();
    }
    num.roots()
        .into_iter()
        .filter(|&(a, _)| den.eval(a) != 0)
        .map(|(alpha, nu)| CriticalPoint { alpha, nu })
        .collect()
}

/// `t`, `𝒞` and the critical points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalProfile {
    pub t: u32,
    pub c: RatFunc,
    pub points: Vec<CriticalPoint>,
}

impl CriticalProfile {
    pub fn new(t: u32, c: RatFunc, p: u64) -> Self {
        let points = critical_set(&c, p);
        Self { t, c, points }
    }

    pub fn point(&self, alpha: u64) -> Option<CriticalPoint> {
        self.points.iter().copied().find(|cp| cp.alpha == alpha)
    }

    /// `deg_p(𝒞₊)`: degree of the numerator reduced mod `p` (no cancellation).
    pub fn deg_p_numerator(&self, p: u64) -> usize {
        self.c.num().mod_p(p).deg()
    }
}

/// Builds the profile, or `None` when the phase is constant.
pub fn critical_profile(
    f: &RatFunc,
    g: &RatFunc,
    chi: &MultChar,
) -> Result<Option<CriticalProfile>> {
    profile_for(f, g, chi.c_chi(), chi.pp().p())
}

/// Local series data at a residue.
///
/// For odd `p`, `F(Y) = c_χ log(g(α+pY)/g(α)) + f(α+pY) - f(α)`; for `p = 2`
/// the series is `F_α(2Y)`, i.e. the same expression with `α + 4Y`. Then
/// `σ = ord_p F`, `G = p^{-σ} F`, `τ = ord_p G'`, `H = p^{-τ} G'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalData {
    pub alpha: u64,
    pub nu: u32,
    pub t: u32,
    /// Precision exponent of `F`.
    pub precision: u32,
    pub f_series: PSeries,
    /// `σ`, capped at `precision` when `F` vanishes to that precision.
    pub sigma: u32,
    pub g_series: PSeries,
    pub tau: u32,
    pub h_series: PSeries,
    /// `deg_p(G)`, `None` when `G` is not determined mod `p`.
    pub deg_g: Option<usize>,
    pub deg_h: Option<usize>,
    /// The `α + 2` branch (`p = 2` only).
    pub twin: Option<Box<LocalData>>,
}

impl LocalData {
    /// `G` as an integer polynomial modulo `p^{m-σ}` (`None` when `m ≤ σ`).
    pub fn g_poly(&self, m: u32) -> Option<IntPoly> {
        if m <= self.sigma {
            return None;
        }
        let k = m - self.sigma;
        assert!(
            k <= self.g_series.precision(),
            "local series computed below the needed precision"
        );
        let modulus = self.g_series.p().pow(k);
        Some(IntPoly::new(
            self.g_series
                .coeffs()
                .iter()
                .map(|&c| BigInt::from(c % modulus))
                .collect(),
        ))
    }

    /// Whether all valuations are determined (no precision saturation).
    pub fn is_exact(&self) -> bool {
        self.sigma < self.precision && self.deg_g.is_some() && self.deg_h.is_some()
    }
}

/// Names of the valuation relations violated by one branch of local data
/// (empty when all hold, or when the valuations are not fully determined).
///
/// Odd `p`: `σ ≥ t+2`, `σ ≤ ν+1+t-τ`, `deg G ≤ σ-t+ord_p(deg G)`,
/// `deg H ≤ σ+τ-t-1 ≤ ν`, `τ ≤ ord_p(deg G)`, and `σ = t+2`, `τ = 0` when
/// `ν = 1`. For `p = 2` the analogues with the `2Y` scaling are checked on both
/// branches.
pub fn relation_failures(data: &LocalData, p: u64) -> Vec<&'static str> {
    let mut out = Vec::new();
    let mut check = |d: &LocalData| {
        let (Some(dg), Some(dh)) = (d.deg_g, d.deg_h) else {
            return;
        };
        if !d.is_exact() || dg == 0 {
            return;
        }
        let (s, t, tau, nu) = (
            i64::from(d.sigma),
            i64::from(d.t),
            i64::from(d.tau),
            i64::from(d.nu),
        );
        let (dg, dh) = (dg as i64, dh as i64);
        let og = i64::from(ord_p(dg as u64, p));
        let mut fail = |ok: bool, name| {
            if !ok {
                out.push(name);
            }
        };
        if p == 2 {
            fail(s >= t + 3, "sigma_low");
            fail(s <= 2 * nu + 2 + t - tau, "sigma_up");
            fail(2 * dg <= s - t + og, "deg_g");
            fail(
                2 * dh <= s + tau - t - 2 && s + tau - t - 2 <= 2 * nu,
                "deg_h",
            );
            fail(tau <= og, "tau_up");
        } else {
            fail(s >= t + 2, "sigma_low");
            fail(s <= nu + 1 + t - tau, "sigma_up");
            fail(dg <= s - t + og, "deg_g");
            fail(dh < s + tau - t && s + tau - t - 1 <= nu, "deg_h");
            fail(tau <= og, "tau_up");
            fail(nu != 1 || (s == t + 2 && tau == 0), "mult_one");
        }
    };
    check(data);
    if let Some(twin) = &data.twin {
        check(twin);
    }
    out
}

/// Precision used for local data: enough for the reduction at `p^m` and for
/// the valuation relations at multiplicity `ν`.
pub fn local_precision(p: u64, m: u32, t: u32, nu: u32) -> u32 {
    let want = if p == 2 {
        m.max(t + 2 * nu + 6)
    } else {
        m.max(t + nu + 4)
    };
    let cap = max_precision(p);
    want.min(cap).max(m.min(cap))
}

/// Largest `n` with `p^n` below the supported modulus range.
pub fn max_precision(p: u64) -> u32 {
    let mut n = 0;
    let mut acc: u128 = 1;
    while acc * (p as u128) < PrimePower::MAX_MODULUS as u128 {
        acc *= p as u128;
        n += 1;
    }
    n
}

/// Local data at a critical point `α`; errors when `α` is not critical or not
/// in the domain of the sum.
pub fn local_data(
    f: &RatFunc,
    g: &RatFunc,
    chi: &MultChar,
    profile: &CriticalProfile,
    alpha: u64,
) -> Result<LocalData> {
    let pp = chi.pp();
    let p = pp.p();
    let need = if p == 2 { profile.t + 3 } else { profile.t + 2 };
    if pp.m() < need {
        return domain(format!(
            "modulus {pp} too small for the reduction (t = {})",
            profile.t
        ));
    }
    let Some(cp) = profile.point(alpha % p) else {
        return domain(format!("{alpha} is not a critical point"));
    };
    let n = local_precision(p, pp.m(), profile.t, cp.nu);
    local_series(f, g, chi.c_chi(), p, alpha % p, profile.t, cp.nu, n)
}

/// Local data at any residue `α` in the domain (no criticality check); for
/// `p = 2` also computes the `α + 2` branch.
#[allow(clippy::too_many_arguments)]
pub fn local_series(
    f: &RatFunc,
    g: &RatFunc,
    c_chi: u64,
    p: u64,
    alpha: u64,
    t: u32,
    nu: u32,
    n: u32,
) -> Result<LocalData> {
    let terms = series_terms(p, t, n);
    let mut data = branch_series(f, g, c_chi, p, alpha, t, nu, n, terms)?;
    if p == 2 {
        data.twin = Some(Box::new(branch_series(
            f,
            g,
            c_chi,
            p,
            alpha + 2,
            t,
            nu,
            n,
            terms,
        )?));
    }
    Ok(data)
}

/// Number of series terms: every coefficient of `Y^k` beyond it vanishes mod
/// `p^n`, given the valuation lower bound `t + e k - ord_p(k)` (`e = 1` for odd
/// `p`, `e = 2` for the `p = 2` scaling).
pub fn series_terms(p: u64, t: u32, n: u32) -> usize {
    let e = if p == 2 { 2 } else { 1 };
    let mut last = 1u64;
    for k in 1..=(4 * n as u64 + 64) {
        if (t as u64 + e * k) < n as u64 + ord_p(k, p) as u64 {
            last = k;
        }
    }
    last as usize + 1
}

#[allow(clippy::too_many_arguments)]
fn branch_series(
    f: &RatFunc,
    g: &RatFunc,
    c_chi: u64,
    p: u64,
    alpha: u64,
    t: u32,
    nu: u32,
    n: u32,
    terms: usize,
) -> Result<LocalData> {
    let scale = BigInt::from(if p == 2 { 4 } else { p });
    let a = BigInt::from(alpha);
    let fs = taylor_series(f, &a, &scale, p, n, terms)?;
    let modulus = fs.modulus();
    let mut coeffs = fs.coeffs().to_vec();
    coeffs[0] = 0;
    let mut big_f = PSeries::new(p, n, coeffs);
    if !g.is_constant() {
        let gs = taylor_series(g, &a, &scale, p, n, terms)?;
        let g0 = gs.coeff(0);
        if g0 % p == 0 {
            return domain(format!("g vanishes at {alpha} modulo {p}"));
        }
        let ratio = gs.scale(inv_mod(g0, modulus).expect("unit"));
        let mut u = ratio.coeffs().to_vec();
        u[0] = 0;
        let log = series_log1p(&PSeries::new(p, n, u))?;
        big_f = big_f.add(&log.scale(c_chi % modulus));
    }
    let sigma = big_f.min_valuation();
    let g_series = big_f.div_p_pow(sigma);
    let gd = g_series.derivative();
    let tau = gd.min_valuation();
    let h_series = gd.div_p_pow(tau);
    let deg_g = (g_series.precision() > 0)
        .then(|| g_series.unit_degree())
        .flatten();
    let deg_h = (h_series.precision() > 0)
        .then(|| h_series.unit_degree())
        .flatten();
    Ok(LocalData {
        alpha,
        nu,
        t,
        precision: n,
        f_series: big_f,
        sigma,
        g_series,
        tau,
        h_series,
        deg_g,
        deg_h,
        twin: None,
    })
}

/// Hensel lift of a simple root `α` of `𝒞₊` (mod `p`) to `α*` with
/// `𝒞₊(α*) ≡ 0 (mod p^k)`.
pub fn hensel_lift(c: &RatFunc, alpha: u64, p: u64, k: u32) -> Result<u64> {
    let q = padic::checked_pow(p, k)
        .ok_or_else(|| crate::Error::Domain("lift precision too large".into()))?;
    let num = c.num();
    let dnum = num.derivative();
    let d0 = dnum.eval_mod(alpha, p);
    if d0 == 0 {
        return domain(format!("{alpha} is not a simple root"));
    }
    if num.eval_mod(alpha, p) != 0 {
        return domain(format!("{alpha} is not a root modulo {p}"));
    }
    let mut x = alpha % q;
    let inv = inv_mod(d0, p).expect("unit");
    // Linear lifting one digit at a time: x ← x - 𝒞₊(x)/𝒞₊'(α).
    let mut pk = p;
    while pk < q {
        let next = (pk as u128 * p as u128).min(q as u128) as u64;
        let v = num.eval_mod(x, next);
        let step = mul_mod((v / pk) % p, inv, p);
        x = (x + next - mul_mod(step, pk, next)) % next;
        pk = next;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyrat::parse_ratfunc;

    fn rf(s: &str) -> RatFunc {
        parse_ratfunc(s).unwrap()
    }

    #[test]
    fn memoized_results_follow_the_pair() {
        let pairs = [
            ("x^3", "x + 1"),
            ("x^2 + 1/x", "1"),
            ("x^3", "x + 1"),
            ("0", "x^2 + 3"),
        ];
        for _ in 0..2 {
            for (fs, gs) in pairs {
                let (f, g) = (rf(fs), rf(gs));
                for c in [1, 2, 3, 9] {
                    let direct = CriticalBase::new(&f, &g).unwrap().with_c_chi(c, 3).unwrap();
                    assert_eq!(t_and_c(&f, &g, c, 3).unwrap(), direct, "{fs} {gs} {c}");
                    let expected = match direct {
                        CriticalFunction::Profile { t, c } => Some(CriticalProfile::new(t, c, 3)),
                        CriticalFunction::ConstantPhase => None,
                    };
                    assert_eq!(profile_for(&f, &g, c, 3).unwrap(), expected);
                }
            }
        }
    }

    fn profile(f: &str, g: &str, c_chi: u64, p: u64) -> (u32, RatFunc) {
        match t_and_c(&rf(f), &rf(g), c_chi, p).unwrap() {
            CriticalFunction::Profile { t, c } => (t, c),
            CriticalFunction::ConstantPhase => panic!("constant phase"),
        }
    }

    #[test]
    fn t_and_c_examples() {
        assert_eq!(profile("x^2", "1", 1, 5), (0, rf("2x")));
        assert_eq!(profile("x^3 + 3x", "1", 1, 3), (1, rf("x^2 + 1")));
        assert_eq!(profile("x", "x", 5, 5), (0, rf("(x + 5)/x")));
        assert_eq!(
            t_and_c(&rf("3"), &rf("1"), 1, 5).unwrap(),
            CriticalFunction::ConstantPhase
        );
    }

    #[test]
    fn critical_set_examples() {
        assert_eq!(
            critical_set(&rf("2x"), 5),
            vec![CriticalPoint { alpha: 0, nu: 1 }]
        );
        assert!(critical_set(&rf("x^2 + 1"), 3).is_empty());
        assert_eq!(
            critical_set(&rf("x^2"), 5),
            vec![CriticalPoint { alpha: 0, nu: 2 }]
        );
        // Common factor cancels before counting: (x^2 - x)/(x - 1) = x over F_5.
        assert_eq!(
            critical_set(&rf("(x^2 + 4x)/(x + 4)"), 5),
            vec![CriticalPoint { alpha: 0, nu: 1 }]
        );
    }

    #[test]
    fn local_data_examples() {
        let pp = PrimePower::new(5, 4).unwrap();
        let chi = MultChar::principal(pp);
        let f = rf("x^2");
        let prof = critical_profile(&f, &RatFunc::one(), &chi)
            .unwrap()
            .unwrap();
        let ld = local_data(&f, &RatFunc::one(), &chi, &prof, 0).unwrap();
        assert_eq!((ld.sigma, ld.tau), (2, 0));
        assert_eq!(ld.g_poly(4).unwrap(), IntPoly::from_i64(&[0, 0, 1]));
        assert_eq!(&ld.h_series.coeffs()[..3], &[0, 2, 0]);

        let pp = PrimePower::new(3, 4).unwrap();
        let chi = MultChar::principal(pp);
        let f = rf("x^3");
        let prof = critical_profile(&f, &RatFunc::one(), &chi)
            .unwrap()
            .unwrap();
        let ld = local_data(&f, &RatFunc::one(), &chi, &prof, 0).unwrap();
        assert_eq!((ld.sigma, ld.tau), (3, 1));
        assert_eq!(ld.g_poly(4).unwrap(), IntPoly::from_i64(&[0, 0, 0, 1]));
        assert_eq!(&ld.h_series.coeffs()[..3], &[0, 0, 1]);
        assert!(local_data(&f, &RatFunc::one(), &chi, &prof, 1).is_err());
    }

    #[test]
    fn sigma_stable_under_longer_truncation() {
        let f = rf("x^3 + x^2/(x + 2)");
        let g = rf("(x + 1)/(x^2 + 3)");
        for alpha in [0, 1, 2] {
            let terms = series_terms(5, 0, 6);
            let short = branch_series(&f, &g, 7, 5, alpha, 0, 1, 6, terms).unwrap();
            let long = branch_series(&f, &g, 7, 5, alpha, 0, 1, 6, 2 * terms).unwrap();
            assert_eq!(short.sigma, long.sigma);
            assert_eq!(short.tau, long.tau);
            assert!(long.f_series.coeffs()[terms..].iter().all(|&c| c == 0));
        }
    }

    #[test]
    fn hensel_lift_solves_congruence() {
        let c = rf("x^2 - 2");
        // 3^2 = 9 ≡ 2 mod 7.
        let x = hensel_lift(&c, 3, 7, 4).unwrap();
        assert_eq!(c.num().eval_mod(x, 2401), 0);
        assert_eq!(x % 7, 3);
    }
}
