use super::brute::{brute_sum_masked, domain_size, ResidueMask};
use super::reduce::{in_domain, p_power, summand_root};
use super::value::{Root, SumValue};
use crate::bounds::{classify_masked, ClassKind, Decomposition};
use crate::charmod::MultChar;
use crate::error::{domain, Result};
use crate::padic::PrimePower;
use crate::polyrat::RatFunc;

/// A degenerate sum rewritten over a smaller modulus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DegenerateReduction {
    /// `S = p^ℓ e_{p^m}(f(s)) S(χ', g(X+s), p^{ℓ_f-ℓ} F, p^{m-ℓ})` (`ℓ_g = 0`).
    Mixed {
        dec: Decomposition,
        phase: Root,
        f: RatFunc,
        g: RatFunc,
        chi: MultChar,
        mask: ResidueMask,
    },
    /// `S = p^ℓ χ(g(s)) e_{p^m}(f(s)) S(p^{-ℓ} H, p^{m-ℓ})` (`ℓ_g > 0`).
    Pure {
        dec: Decomposition,
        phase: Root,
        f: RatFunc,
        pp: PrimePower,
        mask: ResidueMask,
    },
    /// The summand equals `phase` on the whole domain.
    ConstantOnDomain {
        dec: Option<Decomposition>,
        phase: Root,
        domain: u64,
    },
}

impl DegenerateReduction {
    pub fn l(&self) -> u32 {
        match self {
            Self::Mixed { dec, .. } | Self::Pure { dec, .. } => dec.l,
            Self::ConstantOnDomain { dec, .. } => dec.as_ref().map_or(0, |d| d.l),
        }
    }

    /// Multiplies the rewrite out, summing the reduced problem directly.
    pub fn expand_brute(&self) -> SumValue {
        match self {
            Self::ConstantOnDomain { phase, domain, .. } => {
                SumValue::single(*phase, *domain as i64)
            }
            Self::Mixed {
                dec,
                phase,
                f,
                g,
                chi,
                mask,
            } => brute_sum_masked(f, g, chi, Some(mask.clone()))
                .mul_root(*phase)
                .scale(p_power(chi.pp().p(), dec.l)),
            Self::Pure {
                dec,
                phase,
                f,
                pp,
                mask,
            } => brute_sum_masked(
                f,
                &RatFunc::one(),
                &MultChar::principal(*pp),
                Some(mask.clone()),
            )
            .mul_root(*phase)
            .scale(p_power(pp.p(), dec.l)),
        }
    }
}

/// Domain of the translated sum as a residue mask (intersected with `mask`).
fn shifted_mask(
    f: &RatFunc,
    g: &RatFunc,
    p: u64,
    s: u64,
    mask: Option<&ResidueMask>,
) -> ResidueMask {
    (0..p)
        .map(|y| {
            let x = (y + s) % p;
            in_domain(f, g, p, x) && mask.is_none_or(|mk| mk[x as usize])
        })
        .collect()
}

/// Rewrites a degenerate (or constant-on-domain) sum; errors on non-degenerate input.
pub fn degenerate_reduce(f: &RatFunc, g: &RatFunc, chi: &MultChar) -> Result<DegenerateReduction> {
    degenerate_reduce_masked(f, g, chi, None)
}

pub(crate) fn degenerate_reduce_masked(
    f: &RatFunc,
    g: &RatFunc,
    chi: &MultChar,
    mask: Option<&ResidueMask>,
) -> Result<DegenerateReduction> {
    let pp = chi.pp();
    let (p, m) = (pp.p(), pp.m());
    let cls = classify_masked(f, g, chi, mask)?;
    let constant = |dec: Option<Decomposition>| {
        let s = crate::bounds::first_residue(f, g, p, mask).expect("nonempty domain");
        let phase = summand_root(f, g, chi, s).expect("in domain");
        DegenerateReduction::ConstantOnDomain {
            dec,
            phase,
            domain: domain_size(f, g, chi, mask.cloned()),
        }
    };
    let dec = match (cls.kind, cls.decomposition) {
        (ClassKind::NonDegenerate, _) => return domain("the sum is not degenerate"),
        (ClassKind::ConstantOnDomain, dec) => return Ok(constant(dec)),
        (ClassKind::Degenerate, Some(dec)) => dec,
        (ClassKind::Degenerate, None) => unreachable!("degenerate sums carry a decomposition"),
    };
    let l = dec.l;
    let sub_pp = pp.with_exponent(m - l)?;
    let new_mask = shifted_mask(f, g, p, dec.shift, mask);
    let q = pp.q();
    let f0_mod = rat_const_mod(&dec.f0, q);
    if dec.l_g == 0 {
        let sub_f = dec.f_part.mul_p_pow(p, dec.l_f as i64 - l as i64);
        return Ok(DegenerateReduction::Mixed {
            phase: Root::new(f0_mod, q),
            f: sub_f,
            g: dec.g_shifted.clone(),
            chi: chi.reduce(l)?,
            mask: new_mask,
            dec,
        });
    }
    let phase = summand_root(f, g, chi, dec.shift).expect("shift in domain");
    let sub_f = dec.scaled_h(p).expect("ℓ_g > 0 carries H");
    Ok(DegenerateReduction::Pure {
        phase,
        f: sub_f,
        pp: sub_pp,
        mask: new_mask,
        dec,
    })
}

/// A `p`-integral rational constant modulo `q`.
fn rat_const_mod(c: &RatFunc, q: u64) -> u64 {
    let n = crate::padic::reduce_big(&c.num().coeff(0), q);
    let d = crate::padic::reduce_big(&c.den().coeff(0), q);
    crate::padic::mul_mod(n, crate::padic::inv_mod(d, q).expect("unit denominator"), q)
}
