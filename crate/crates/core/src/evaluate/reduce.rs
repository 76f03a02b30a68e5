use super::brute::ResidueMask;
use super::value::Root;
use crate::charmod::MultChar;
use crate::critical::{local_series, profile_for, t_and_c, CriticalFunction, CriticalProfile};
use crate::error::Result;
use crate::padic::PrimePower;
use crate::polyrat::{CompiledRat, IntPoly, ModValue, RatFunc};

/// Smallest `m - t` for which the reduction to pure sums applies.
pub fn reduction_margin(p: u64) -> u32 {
    if p == 2 {
        3
    } else {
        2
    }
}

/// One local term without its phase: `p^{p_exp}·S(G, p^{m-σ})`, or
/// `p^{p_exp}` alone when `m ≤ σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermShape {
    /// Residue mod `p` (odd `p`) or mod `4` (`p = 2`).
    pub alpha: u64,
    pub sigma: u32,
    pub p_exp: u32,
    pub sub: Option<(IntPoly, PrimePower)>,
}

/// A local term `p^{p_exp}·χ(g(α))e_{p^m}(f(α))·S(G, p^{m-σ})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedTerm {
    pub shape: TermShape,
    pub phase: Root,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReduceOutcome {
    /// Every critical residue with its term; non-critical residues contribute 0.
    Reduced { t: u32, terms: Vec<ReducedTerm> },
    /// The modulus is too small relative to `t` (or the phase is constant).
    NotApplicable(String),
}

/// Whether `α` (mod `p`) lies in the domain: `p ∤ f₋(α) g₊(α) g₋(α)`.
pub fn in_domain(f: &RatFunc, g: &RatFunc, p: u64, alpha: u64) -> bool {
    let a = alpha % p;
    f.den().eval_mod(a, p) != 0 && g.num().eval_mod(a, p) != 0 && g.den().eval_mod(a, p) != 0
}

/// `χ(g(x)) e_{p^m}(f(x))` as an exact root of unity, `None` outside the domain.
pub fn summand_root(f: &RatFunc, g: &RatFunc, chi: &MultChar, x: u64) -> Option<Root> {
    let pp = chi.pp();
    let q = pp.q();
    let fv = match CompiledRat::new(f, q, pp.p()).eval(x % q) {
        ModValue::Value(v) => v,
        ModValue::Pole => return None,
    };
    let (n, d) = CompiledRat::new(g, q, pp.p()).eval_parts(x % q);
    let vo = chi.value_order();
    let cn = chi.eval(n as i128)?;
    let cd = chi.eval(d as i128)?;
    Some(Root::new(fv, q) * Root::new((cn + vo - cd) % vo, vo))
}

/// The class-level part of the reduction (independent of `χ` beyond `c_χ`):
/// `t` and one [`TermShape`] per critical residue in the domain, or `None`
/// when the reduction does not apply.
pub fn reduction_shapes(
    f: &RatFunc,
    g: &RatFunc,
    c_chi: u64,
    pp: PrimePower,
    mask: Option<&ResidueMask>,
) -> Result<Option<(u32, Vec<TermShape>)>> {
    match profile_for(f, g, c_chi, pp.p())? {
        None => Ok(None),
        Some(profile) => shapes_for_profile(f, g, c_chi, pp, &profile, mask),
    }
}

pub(crate) fn shapes_for_profile(
    f: &RatFunc,
    g: &RatFunc,
    c_chi: u64,
    pp: PrimePower,
    profile: &CriticalProfile,
    mask: Option<&ResidueMask>,
) -> Result<Option<(u32, Vec<TermShape>)>> {
    let (p, m, t) = (pp.p(), pp.m(), profile.t);
    if m < t + reduction_margin(p) {
        return Ok(None);
    }
    let mut shapes = Vec::new();
    for cp in &profile.points {
        if !in_domain(f, g, p, cp.alpha) || mask.is_some_and(|mk| !mk[cp.alpha as usize]) {
            continue;
        }
        let data = local_series(f, g, c_chi, p, cp.alpha, t, cp.nu, m)?;
        let branches = std::iter::once(&data).chain(data.twin.as_deref());
        for d in branches {
            let drop = if p == 2 { 2 } else { 1 };
            let (p_exp, sub) = if m <= d.sigma {
                (m - drop, None)
            } else {
                let gp = d.g_poly(m).expect("m > σ");
                (d.sigma - drop, Some((gp, pp.with_exponent(m - d.sigma)?)))
            };
            shapes.push(TermShape {
                alpha: d.alpha,
                sigma: d.sigma,
                p_exp,
                sub,
            });
        }
    }
    Ok(Some((t, shapes)))
}

/// Converts `S(χ, g, f, p^m)` into pure sums at the critical residues.
pub fn reduce_step(f: &RatFunc, g: &RatFunc, chi: &MultChar) -> Result<ReduceOutcome> {
    let pp = chi.pp();
    if f.ord_p(pp.p()).is_some_and(|o| o < 0) || g.ord_p(pp.p()) != Some(0) {
        return Ok(ReduceOutcome::NotApplicable("empty sum".into()));
    }
    let t = match t_and_c(f, g, chi.c_chi(), pp.p())? {
        CriticalFunction::ConstantPhase => {
            return Ok(ReduceOutcome::NotApplicable("constant phase".into()))
        }
        CriticalFunction::Profile { t, .. } => t,
    };
    match reduction_shapes(f, g, chi.c_chi(), pp, None)? {
        None => Ok(ReduceOutcome::NotApplicable(format!(
            "m = {} < t + {} with t = {t}",
            pp.m(),
            reduction_margin(pp.p())
        ))),
        Some((t, shapes)) => {
            let terms = shapes
                .into_iter()
                .map(|shape| {
                    let phase =
                        summand_root(f, g, chi, shape.alpha).expect("critical residue in domain");
                    ReducedTerm { shape, phase }
                })
                .collect();
            Ok(ReduceOutcome::Reduced { t, terms })
        }
    }
}

/// `p^k` as an `i64` multiplier.
pub(crate) fn p_power(p: u64, k: u32) -> i64 {
    i64::try_from(p.checked_pow(k).expect("p-power overflow")).expect("p-power overflow")
}
