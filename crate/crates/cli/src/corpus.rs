//! Deterministic generators for the `(f, g)` pairs of a campaign.

use std::collections::HashSet;

use charsum_core::polyrat::{parse_ratfunc, IntPoly, RatFunc};

use crate::config::{CampaignConfig, Family};

#[derive(Clone, Debug, PartialEq)]
pub struct Pair {
    pub family: Family,
    pub f: RatFunc,
    pub g: RatFunc,
}

fn rf(s: &str) -> RatFunc {
    parse_ratfunc(s).expect("built-in generator expression")
}

/// Every coefficient vector of length `len` over `lo..=hi`, in lexicographic order.
fn coefficient_vectors(len: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    (0..len).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter()
            .flat_map(|v| (lo..=hi).map(move |c| [v.clone(), vec![c]].concat()))
            .collect()
    })
}

/// Nonconstant polynomials of degree at most `deg`, including a constant term.
fn dense_polys(deg: u32, lo: i64, hi: i64) -> Vec<RatFunc> {
    coefficient_vectors(deg as usize + 1, lo, hi)
        .into_iter()
        .map(|c| RatFunc::from_poly(IntPoly::from_i64(&c)))
        .filter(|f| !f.is_constant())
        .collect()
}

/// Proper quotients `num/den` with `deg ≤ deg`, `den` nonconstant with positive leading coefficient.
fn rational_funcs(deg: u32, lo: i64, hi: i64) -> Vec<RatFunc> {
    let polys = coefficient_vectors(deg as usize + 1, lo, hi);
    let dens: Vec<IntPoly> = polys
        .iter()
        .map(|c| IntPoly::from_i64(c))
        .filter(|d| !d.is_constant() && d.lc().is_some_and(|l| l.sign() == num_bigint::Sign::Plus))
        .collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for den in &dens {
        for num in &polys {
            let Ok(f) = RatFunc::new(IntPoly::from_i64(num), den.clone()) else {
                continue;
            };
            if !f.is_constant() && f.den().degree().unwrap_or(0) > 0 && seen.insert(f.serialize()) {
                out.push(f);
            }
        }
    }
    out
}

fn monomials(cfg: &CampaignConfig) -> Vec<(RatFunc, RatFunc)> {
    let powers: Vec<RatFunc> = (1..=cfg.monomial_degree)
        .map(|d| rf(&format!("x^{d}")))
        .collect();
    let mut fs = vec![RatFunc::zero()];
    fs.extend(powers.iter().cloned());
    let mut gs = vec![RatFunc::one()];
    gs.extend(powers.iter().cloned());
    gs.extend(["x + 1", "x - 1", "x + 2", "x^2 + 1"].map(rf));
    fs.iter()
        .flat_map(|f| gs.iter().map(move |g| (f.clone(), g.clone())))
        .collect()
}

fn dense(cfg: &CampaignConfig) -> Vec<(RatFunc, RatFunc)> {
    let polys = dense_polys(cfg.dense_degree, cfg.coeff_min, cfg.coeff_max);
    let partners = ["1", "x", "x + 1", "x^2 - 2"].map(rf);
    let mut pairs: Vec<_> = polys
        .iter()
        .flat_map(|f| partners.iter().map(move |g| (f.clone(), g.clone())))
        .collect();
    pairs.extend(
        polys
            .iter()
            .flat_map(|g| [RatFunc::zero(), RatFunc::x()].map(|f| (f, g.clone()))),
    );
    pairs.into_iter().step_by(cfg.dense_stride).collect()
}

fn rational(cfg: &CampaignConfig) -> Vec<(RatFunc, RatFunc)> {
    let funcs = rational_funcs(cfg.rational_degree, cfg.coeff_min, cfg.coeff_max);
    let mut pairs: Vec<_> = funcs
        .iter()
        .flat_map(|f| [RatFunc::one(), RatFunc::x()].map(|g| (f.clone(), g)))
        .collect();
    pairs.extend(
        funcs
            .iter()
            .flat_map(|g| [RatFunc::zero(), RatFunc::x()].map(|f| (f, g.clone()))),
    );
    pairs.into_iter().step_by(cfg.rational_stride).collect()
}

fn laurent(cfg: &CampaignConfig) -> Vec<(RatFunc, RatFunc)> {
    let n = cfg.laurent_degree;
    let funcs: Vec<RatFunc> = (1..=n)
        .flat_map(|d| (1..=n).map(move |e| rf(&format!("x^{d} + 1/x^{e}"))))
        .collect();
    let partners = ["1", "x", "x + 1", "1 + 1/x"].map(rf);
    let mut pairs: Vec<_> = funcs
        .iter()
        .flat_map(|f| partners.iter().map(move |g| (f.clone(), g.clone())))
        .collect();
    pairs.extend(
        funcs
            .iter()
            .flat_map(|g| [RatFunc::zero(), RatFunc::x()].map(|f| (f, g.clone()))),
    );
    pairs
}

/// Degenerate shapes `p^a F` and `1 + p^b G`.
fn scaled(p: u64) -> Vec<(RatFunc, RatFunc)> {
    const BASE: [&str; 7] = ["x", "x^2", "x^3", "x + x^2", "1/x", "x + 1/x", "x^2 + 2x"];
    let f_of = |a: u32, s: &str| rf(&format!("{}*({s})", p.pow(a)));
    let g_of = |b: u32, s: &str| rf(&format!("1 + {}*({s})", p.pow(b)));
    let mut pairs = Vec::new();
    for a in 1..=2 {
        for b in 1..=2 {
            for fs in BASE {
                for gs in BASE {
                    pairs.push((f_of(a, fs), g_of(b, gs)));
                }
            }
        }
        for fs in BASE {
            pairs.push((f_of(a, fs), RatFunc::one()));
            for h in ["x", "x + 1", "x^2 + 1"] {
                pairs.push((f_of(a, fs), rf(h)));
            }
        }
        for gs in BASE {
            pairs.push((RatFunc::zero(), g_of(a, gs)));
        }
    }
    pairs
}

/// Whether `S(χ, g, f, p^m)` has a nonempty natural domain shape: `ord_p f ≥ 0`,
/// `ord_p g = 0`, and not both constant.
pub fn admissible(f: &RatFunc, g: &RatFunc, p: u64) -> bool {
    !g.is_zero()
        && f.ord_p(p).is_none_or(|o| o >= 0)
        && g.ord_p(p) == Some(0)
        && !(f.is_constant() && g.is_constant())
}

/// The deduplicated corpus for prime `p`, in family order.
pub fn corpus(cfg: &CampaignConfig, p: u64) -> Vec<Pair> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for &family in &cfg.families {
        let pairs = match family {
            Family::Monomial => monomials(cfg),
            Family::Dense => dense(cfg),
            Family::Rational => rational(cfg),
            Family::Laurent => laurent(cfg),
            Family::Scaled => scaled(p),
        };
        for (f, g) in pairs {
            if admissible(&f, &g, p) && seen.insert((f.serialize(), g.serialize())) {
                out.push(Pair { family, f, g });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_corpus_is_large_and_deterministic() {
        let cfg = CampaignConfig::default();
        for p in [2, 3, 5, 7] {
            let c = corpus(&cfg, p);
            assert!(c.len() >= 2000, "p = {p}: {} pairs", c.len());
            assert_eq!(c, corpus(&cfg, p));
            for fam in Family::ALL {
                assert!(
                    c.iter().any(|pair| pair.family == fam),
                    "p = {p} lacks {fam}"
                );
            }
        }
    }

    #[test]
    fn monomials_cover_all_degrees() {
        let cfg = CampaignConfig {
            families: vec![Family::Monomial],
            ..CampaignConfig::default()
        };
        let c = corpus(&cfg, 5);
        for d in 1..=6 {
            let f = rf(&format!("x^{d}"));
            assert!(c.iter().any(|pair| pair.f == f && pair.g == RatFunc::one()));
        }
        assert!(c.iter().all(|pair| admissible(&pair.f, &pair.g, 5)));
    }

    #[test]
    fn laurent_pairs_have_poles_at_zero() {
        let cfg = CampaignConfig {
            families: vec![Family::Laurent],
            ..CampaignConfig::default()
        };
        let c = corpus(&cfg, 3);
        assert!(c.iter().any(|pair| pair.f == rf("x^2 + 1/x^3")));
        assert_eq!(c.len(), 16 * 4 + 16 * 2);
    }
}
