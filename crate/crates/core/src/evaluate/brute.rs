use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_integer::Integer;
use rayon::prelude::*;

use super::value::SumValue;
use crate::charmod::MultChar;
use crate::padic::{discrete_decompose, DlogTable, PrimePower};
use crate::polyrat::{CompiledRat, ModValue, RatFunc};

/// Tables up to this modulus are cached and shared.
const TABLE_CACHE_LIMIT: u64 = 1 << 22;
/// Dense count vectors up to this root order.
const DENSE_LIMIT: u64 = 1 << 24;
/// Root orders beyond this multiple of the term count accumulate sparsely.
const SPARSE_RATIO: u64 = 8;
/// Sparse runs up to this many terms are sorted rather than hashed.
const SPARSE_VEC_LIMIT: u64 = 1 << 20;
/// Below this many terms the sum runs on the calling thread.
const PARALLEL_THRESHOLD: u64 = 1 << 16;

/// Residue classes mod `p` admitted in addition to the natural domain.
pub type ResidueMask = Arc<[bool]>;

type TableCache = RwLock<HashMap<(u64, u32, u64), Arc<DlogTable>>>;

/// Discrete-log table for the character's generator data, cached when small.
pub fn dlog_table(chi: &MultChar) -> Option<Arc<DlogTable>> {
    static CACHE: OnceLock<TableCache> = OnceLock::new();
    let pp = chi.pp();
    if pp.q() > DlogTable::MAX_TABLE_MODULUS {
        return None;
    }
    let key = (pp.p(), pp.m(), chi.data().omega);
    if pp.q() <= TABLE_CACHE_LIMIT {
        let cache = CACHE.get_or_init(Default::default);
        if let Some(t) = cache.read().expect("table cache").get(&key) {
            return Some(t.clone());
        }
        let t = Arc::new(DlogTable::new(chi.data()).ok()?);
        return Some(
            cache
                .write()
                .expect("table cache")
                .entry(key)
                .or_insert(t)
                .clone(),
        );
    }
    DlogTable::new(chi.data()).ok().map(Arc::new)
}

/// Per-`x` summand `χ(g(x)) e_{p^m}(f(x))` as a root index out of `order`.
pub(crate) struct Summand<'a> {
    pp: PrimePower,
    f: CompiledRat,
    g: Option<CompiledRat>,
    chi: &'a MultChar,
    table: Option<Arc<DlogTable>>,
    mask: Option<ResidueMask>,
    order: u64,
    f_step: u64,
    chi_step: u64,
    /// The character is principal, so only the domain of `g` matters.
    trivial_chi: bool,
}

impl<'a> Summand<'a> {
    pub(crate) fn new(
        f: &RatFunc,
        g: &RatFunc,
        chi: &'a MultChar,
        mask: Option<ResidueMask>,
    ) -> Self {
        let pp = chi.pp();
        let (q, p) = (pp.q(), pp.p());
        let vo = chi.value_order();
        let order = (q as u128 / q.gcd(&vo) as u128 * vo as u128) as u64;
        let trivial_chi = chi.is_principal();
        let g_is_one = g.is_constant() && g == &RatFunc::one();
        let table = if trivial_chi || g_is_one {
            None
        } else {
            dlog_table(chi)
        };
        Self {
            pp,
            f: CompiledRat::new(f, q, p),
            g: (!g_is_one).then(|| CompiledRat::new(g, q, p)),
            chi,
            table,
            mask,
            order,
            f_step: order / q,
            chi_step: order / vo,
            trivial_chi,
        }
    }

    fn chi_index(&self, x: u64) -> u64 {
        match &self.table {
            Some(t) => self.chi.eval_with(t, x).expect("unit"),
            None => {
                let d = discrete_decompose(x as i128, self.chi.data()).expect("unit");
                self.chi.index_of_dlog(d)
            }
        }
    }

    /// Root index of the summand at `x ∈ [0, q)`, or `None` outside the domain.
    #[inline]
    pub(crate) fn index(&self, x: u64) -> Option<u64> {
        let p = self.pp.p();
        if let Some(mask) = &self.mask {
            if !mask[(x % p) as usize] {
                return None;
            }
        }
        let fv = match self.f.eval(x) {
            ModValue::Value(v) => v,
            ModValue::Pole => return None,
        };
        let mut idx = fv * self.f_step;
        if let Some(g) = &self.g {
            let (n, d) = g.eval_parts(x);
            if n % p == 0 || d % p == 0 {
                return None;
            }
            if !self.trivial_chi {
                let vo = self.chi.value_order();
                let c = (self.chi_index(n) + vo - self.chi_index(d)) % vo;
                idx += c * self.chi_step;
            }
        }
        Some(idx % self.order)
    }

    /// Accumulates the summands over `x = start + step·y`, `0 ≤ y < count`.
    pub(crate) fn sum_progression(&self, start: u64, step: u64, count: u64) -> SumValue {
        let order = self.order;
        let run = |lo: u64, hi: u64| -> Vec<(u64, i64)> {
            if order <= DENSE_LIMIT && order <= SPARSE_RATIO * (hi - lo) {
                let mut dense = vec![0i64; order as usize];
                for y in lo..hi {
                    if let Some(j) = self.index(start + step * y) {
                        dense[j as usize] += 1;
                    }
                }
                dense
                    .into_iter()
                    .enumerate()
                    .filter(|e| e.1 != 0)
                    .map(|(j, c)| (j as u64, c))
                    .collect()
            } else if hi - lo <= SPARSE_VEC_LIMIT {
                (lo..hi)
                    .filter_map(|y| self.index(start + step * y))
                    .map(|j| (j, 1))
                    .collect()
            } else {
                let mut map: HashMap<u64, i64> = HashMap::new();
                for y in lo..hi {
                    if let Some(j) = self.index(start + step * y) {
                        *map.entry(j).or_default() += 1;
                    }
                }
                map.into_iter().collect()
            }
        };
        let pairs = if count < PARALLEL_THRESHOLD {
            run(0, count)
        } else {
            let blocks = rayon::current_num_threads().max(1) as u64;
            let size = count.div_ceil(blocks);
            (0..blocks)
                .into_par_iter()
                .map(|b| run((b * size).min(count), ((b + 1) * size).min(count)))
                .reduce(Vec::new, |mut a, b| {
                    a.extend(b);
                    a
                })
        };
        SumValue::from_sparse(order, pairs)
    }
}

/// `S(χ, g, f, p^m)` by direct summation over `x ∈ [0, p^m)`.
pub fn brute_sum(f: &RatFunc, g: &RatFunc, chi: &MultChar) -> SumValue {
    brute_sum_masked(f, g, chi, None)
}

/// Direct summation restricted to an additional residue mask mod `p`.
pub fn brute_sum_masked(
    f: &RatFunc,
    g: &RatFunc,
    chi: &MultChar,
    mask: Option<ResidueMask>,
) -> SumValue {
    Summand::new(f, g, chi, mask).sum_progression(0, 1, chi.pp().q())
}

/// `S_α`: direct summation over `x ≡ α (mod p)`.
pub fn local_sum(f: &RatFunc, g: &RatFunc, chi: &MultChar, alpha: u64) -> SumValue {
    let pp = chi.pp();
    Summand::new(f, g, chi, None).sum_progression(alpha % pp.p(), pp.p(), pp.q() / pp.p())
}

/// Direct summation over `x ≡ α (mod 4)` (`p = 2`, `m ≥ 2`).
pub fn local_sum_mod4(f: &RatFunc, g: &RatFunc, chi: &MultChar, alpha: u64) -> SumValue {
    let pp = chi.pp();
    assert!(
        pp.p() == 2 && pp.m() >= 2,
        "residues mod 4 need p = 2 and m ≥ 2"
    );
    Summand::new(f, g, chi, None).sum_progression(alpha % 4, 4, pp.q() / 4)
}

/// Number of `x ∈ [0, p^m)` in the domain.
pub fn domain_size(f: &RatFunc, g: &RatFunc, chi: &MultChar, mask: Option<ResidueMask>) -> u64 {
    let pp = chi.pp();
    let p = pp.p();
    let principal = MultChar::principal(pp);
    let s = Summand::new(f, g, &principal, mask);
    let per_class = pp.q() / p;
    (0..p).filter(|&a| s.index(a).is_some()).count() as u64 * per_class
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyrat::parse_ratfunc;

    fn rf(s: &str) -> RatFunc {
        parse_ratfunc(s).unwrap()
    }

    fn pp(p: u64, m: u32) -> PrimePower {
        PrimePower::new(p, m).unwrap()
    }

    #[test]
    fn brute_examples() {
        let one = RatFunc::one();
        let v = brute_sum(&rf("x^2"), &one, &MultChar::principal(pp(5, 2)));
        assert!((v.magnitude() - 5.0).abs() < 1e-9);
        assert_eq!(v.total(), 25);
        let quad = MultChar::new(pp(5, 1), 2, None).unwrap();
        assert_eq!(quad.order(), 2);
        let v = brute_sum(&rf("x"), &rf("x"), &quad);
        assert!((v.magnitude() - 5f64.sqrt()).abs() < 1e-9);
        assert_eq!(v.total(), 4);
        let v = brute_sum(&rf("x^3"), &one, &MultChar::principal(pp(3, 3)));
        assert!((v.magnitude() - 9.0).abs() < 1e-9);
    }

    #[test]
    fn local_examples_and_partition() {
        let one = RatFunc::one();
        let chi = MultChar::principal(pp(5, 2));
        let f = rf("x^2");
        assert!(local_sum(&f, &one, &chi, 1).magnitude() < 1e-9);
        assert!((local_sum(&f, &one, &chi, 0).magnitude() - 5.0).abs() < 1e-9);
        let chi = MultChar::new(pp(5, 2), 3, None).unwrap();
        let (f, g) = (rf("x^2 + 1/x"), rf("x + 2"));
        let total = (0..5).fold(SumValue::zero(), |acc, a| {
            acc.add(&local_sum(&f, &g, &chi, a))
        });
        assert_eq!(total, brute_sum(&f, &g, &chi));
    }

    #[test]
    fn empty_when_valuations_fail() {
        let chi = MultChar::principal(pp(5, 2));
        assert_eq!(brute_sum(&rf("x/5"), &RatFunc::one(), &chi).weight(), 0);
        assert_eq!(brute_sum(&rf("x"), &rf("5x + 5"), &chi).weight(), 0);
    }
}
