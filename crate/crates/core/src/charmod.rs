//! Multiplicative characters modulo `p^m`, parametrized by the value at the
//! primitive root (odd `p`) or at the generators `5` and `-1` (`p = 2`).

use num_integer::Integer;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::padic::{
    self, discrete_decompose, mul_mod, ord_p, Dlog, DlogTable, PrimePower, UnitLogData,
};

/// A character modulo `p^m`.
///
/// For odd `p`, `χ(ω^k) = e(ck / (p^{m-1}(p-1)))`. For `p = 2` and `m ≥ 3`,
/// `χ(5) = e_{2^{m-2}}(c)` and `χ(-1) = (-1)^κ`; for `m = 2` the index is
/// `c = 1` and `κ` alone selects the character; for `m = 1` only the principal
/// character (`c = 1`, `κ = 0`) exists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultChar {
    pp: PrimePower,
    c: u64,
    kappa: u8,
    #[serde(skip)]
    data: UnitLogData,
    c_chi: u64,
    t_chi: u32,
    conductor: u64,
    order: u64,
    value_order: u64,
    principal: bool,
}

impl MultChar {
    pub fn new(pp: PrimePower, c: u64, kappa: Option<u8>) -> Result<Self> {
        Self::with_data(padic::unit_log_data(pp), c, kappa)
    }

    /// The principal character modulo `pp`.
    pub fn principal(pp: PrimePower) -> Self {
        let c = if pp.p() == 2 {
            if pp.m() >= 3 {
                pp.q() / 4
            } else {
                1
            }
        } else {
            pp.unit_count()
        };
        Self::new(pp, c, Some(0)).expect("principal character is valid")
    }

    /// Builds the character against explicit generator data.
    pub fn with_data(data: UnitLogData, c: u64, kappa: Option<u8>) -> Result<Self> {
        let pp = data.pp;
        let (p, m) = (pp.p(), pp.m());
        let kappa = kappa.unwrap_or(0);
        if kappa > 1 {
            return domain("kappa must be 0 or 1");
        }
        if p != 2 {
            let n = pp.unit_count();
            if !(1..=n).contains(&c) {
                return domain(format!("character index {c} outside 1..={n}"));
            }
            if kappa != 0 {
                return domain("kappa applies only to p = 2");
            }
            let lm = data.log_modulus;
            let c_chi = match mul_mod(data.rbar, c % lm, lm) {
                0 => lm,
                v => v,
            };
            let t_chi = ord_p(c, p);
            return Ok(Self {
                pp,
                c,
                kappa: 0,
                c_chi,
                t_chi,
                conductor: p.pow(m.saturating_sub(t_chi)),
                order: n / c.gcd(&n),
                value_order: n,
                principal: c == n,
                data,
            });
        }
        match m {
            1 => {
                if c != 1 || kappa != 0 {
                    return domain(
                        "modulo 2 only the principal character (c = 1, kappa = 0) exists",
                    );
                }
                Ok(Self {
                    pp,
                    c,
                    kappa,
                    c_chi: 1,
                    t_chi: 0,
                    conductor: 2,
                    order: 1,
                    value_order: 1,
                    principal: true,
                    data,
                })
            }
            2 => {
                if c != 1 {
                    return domain("modulo 4 the index is c = 1 (kappa selects the character)");
                }
                Ok(Self {
                    pp,
                    c,
                    kappa,
                    c_chi: 1,
                    t_chi: if kappa == 1 { 0 } else { 1 },
                    conductor: if kappa == 1 { 4 } else { 2 },
                    order: if kappa == 1 { 2 } else { 1 },
                    value_order: 2,
                    principal: kappa == 0,
                    data,
                })
            }
            _ => {
                let half = pp.q() / 4;
                if !(1..=half).contains(&c) {
                    return domain(format!("character index {c} outside 1..={half}"));
                }
                let c_chi = match mul_mod(data.rbar, c % half, half) {
                    0 => half,
                    v => v,
                };
                let t_chi = ord_p(c, 2);
                let order5 = half / c.gcd(&half);
                Ok(Self {
                    pp,
                    c,
                    kappa,
                    c_chi,
                    t_chi,
                    conductor: 1 << (m - t_chi),
                    order: if kappa == 1 { order5.max(2) } else { order5 },
                    value_order: pp.q() / 2,
                    principal: c == half && kappa == 0,
                    data,
                })
            }
        }
    }

    /// Every character modulo `pp`, in increasing `(c, κ)` order.
    pub fn all(pp: PrimePower) -> Vec<Self> {
        let data = padic::unit_log_data(pp);
        let params: Vec<(u64, u8)> = if pp.p() != 2 {
            (1..=pp.unit_count()).map(|c| (c, 0)).collect()
        } else if pp.m() == 1 {
            vec![(1, 0)]
        } else if pp.m() == 2 {
            vec![(1, 0), (1, 1)]
        } else {
            (1..=pp.q() / 4).flat_map(|c| [(c, 0), (c, 1)]).collect()
        };
        params
            .into_iter()
            .map(|(c, k)| Self::with_data(data.clone(), c, Some(k)).expect("valid index"))
            .collect()
    }

    pub fn pp(&self) -> PrimePower {
        self.pp
    }

    pub fn c(&self) -> u64 {
        self.c
    }

    pub fn kappa(&self) -> u8 {
        self.kappa
    }

    pub fn data(&self) -> &UnitLogData {
        &self.data
    }

    /// Canonical representative of `c_χ = R̄c` in `[1, p^{m-1}]` (`[1, 2^{m-2}]` for `p = 2`).
    pub fn c_chi(&self) -> u64 {
        self.c_chi
    }

    pub fn t_chi(&self) -> u32 {
        self.t_chi
    }

    /// `p^{m - t_χ}` (see [`MultChar::is_principal`] for the principal case).
    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_principal(&self) -> bool {
        self.principal
    }

    pub fn is_primitive(&self) -> bool {
        self.t_chi == 0
    }

    /// Values are `e(j / value_order)`.
    pub fn value_order(&self) -> u64 {
        self.value_order
    }

    /// Index `j` with `χ(x) = e(j / value_order)` given the discrete log of `x`.
    #[inline]
    pub fn index_of_dlog(&self, d: Dlog) -> u64 {
        let n = self.value_order;
        if self.pp.p() != 2 {
            return mul_mod(self.c % n, d.k % n, n);
        }
        match self.pp.m() {
            1 => 0,
            2 => u64::from(self.kappa & d.a),
            _ => (2 * mul_mod(self.c, d.k, n) + u64::from(self.kappa & d.a) * (n / 2)) % n,
        }
    }

    /// `χ(x)` as a root index out of [`MultChar::value_order`], or `None` when `p | x`.
    pub fn eval(&self, x: i128) -> Option<u64> {
        let r = self.pp.reduce(x);
        if !self.pp.is_unit(r) {
            return None;
        }
        let d = discrete_decompose(r as i128, &self.data).expect("unit");
        Some(self.index_of_dlog(d))
    }

    /// `χ(x)` through a precomputed table.
    #[inline]
    pub fn eval_with(&self, table: &DlogTable, x: u64) -> Option<u64> {
        table.get(x).map(|d| self.index_of_dlog(d))
    }

    /// The character modulo `p^{m-ℓ}` through which `χ` factors, for `ℓ ≤ t_χ`.
    pub fn reduce(&self, l: u32) -> Result<Self> {
        if l == 0 {
            return Ok(self.clone());
        }
        let (p, m) = (self.pp.p(), self.pp.m());
        if l > self.t_chi || l >= m {
            return domain(format!(
                "character does not factor through modulus {p}^{}",
                m - l.min(m)
            ));
        }
        let pp = self.pp.with_exponent(m - l)?;
        let data = padic::unit_log_data_with_root(pp, self.data.omega)?;
        let c = if p == 2 && m - l <= 2 {
            1
        } else {
            self.c / p.pow(l)
        };
        Self::with_data(data, c, Some(self.kappa))
    }
}

/// `χ(x)` for the character of [`MultChar::new`]`(pp, c, kappa)`.
pub fn chi_eval(chi: &MultChar, x: i128) -> Option<u64> {
    chi.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(p: u64, m: u32) -> PrimePower {
        PrimePower::new(p, m).unwrap()
    }

    #[test]
    fn make_char_examples() {
        let chi = MultChar::new(pp(3, 3), 1, None).unwrap();
        assert_eq!((chi.t_chi(), chi.is_primitive(), chi.c_chi()), (0, true, 4));
        let chi = MultChar::new(pp(3, 3), 18, None).unwrap();
        assert_eq!((chi.t_chi(), chi.order(), chi.is_principal()), (2, 1, true));
        assert_eq!(chi.conductor(), 3);
        let chi = MultChar::new(pp(2, 4), 1, Some(0)).unwrap();
        // χ(5) = i = e(2/8) out of value order 8.
        assert_eq!((chi.eval(5), chi.value_order()), (Some(2), 8));
        assert!(MultChar::new(pp(5, 2), 21, None).is_err());
        assert!(MultChar::new(pp(5, 2), 0, None).is_err());
    }

    #[test]
    fn chi_eval_examples() {
        let principal = MultChar::principal(pp(5, 2));
        assert!((1..25)
            .filter(|x| x % 5 != 0)
            .all(|x| principal.eval(x) == Some(0)));
        assert_eq!(principal.eval(10), None);
        let chi = MultChar::new(pp(3, 2), 1, None).unwrap();
        assert_eq!((chi.eval(2), chi.value_order()), (Some(1), 6));
        assert_eq!(chi.eval(4), Some(2));
        // Same value through the logarithm: e_9(c_χ log 4) with log 4 ≡ 3 (mod 9).
        let l = padic::padic_log(4, 3, 2).unwrap();
        assert_eq!(mul_mod(chi.c_chi(), l, 9), 3);
    }

    #[test]
    fn counts_and_ranges() {
        assert_eq!(MultChar::all(pp(5, 2)).len(), 20);
        assert_eq!(MultChar::all(pp(2, 5)).len(), 16);
        assert_eq!(MultChar::all(pp(2, 2)).len(), 2);
        assert_eq!(MultChar::all(pp(2, 1)).len(), 1);
        assert_eq!(
            MultChar::all(pp(2, 5))
                .iter()
                .filter(|c| c.is_principal())
                .count(),
            1
        );
    }

    #[test]
    fn reduction_agrees_on_units() {
        let chi = MultChar::new(pp(5, 3), 50, None).unwrap();
        let r = chi.reduce(2).unwrap();
        assert_eq!(r.pp(), pp(5, 1));
        for x in (1..125).filter(|x| x % 5 != 0) {
            let a = chi.eval(x).unwrap() as f64 / chi.value_order() as f64;
            let b = r.eval(x).unwrap() as f64 / r.value_order() as f64;
            assert!((a - b).abs() < 1e-12);
        }
    }
}
