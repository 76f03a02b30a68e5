use std::collections::HashMap;
use std::f64::consts::TAU;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use num_integer::Integer;

/// Orders up to this size get a cached table of roots of unity.
const ROOT_TABLE_LIMIT: u64 = 1 << 20;

type RootCache = RwLock<HashMap<u64, Arc<[Complex64]>>>;

fn root_table(n: u64) -> Arc<[Complex64]> {
    static CACHE: OnceLock<RootCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.read().expect("root cache").get(&n) {
        return t.clone();
    }
    let table: Arc<[Complex64]> = (0..n).map(|j| root_direct(j, n)).collect();
    cache
        .write()
        .expect("root cache")
        .entry(n)
        .or_insert(table)
        .clone()
}

fn root_direct(j: u64, n: u64) -> Complex64 {
    let (s, c) = (TAU * ((j % n) as f64 / n as f64)).sin_cos();
    Complex64::new(c, s)
}

/// `e^{2πi j/n}`.
pub fn root_of_unity(j: u64, n: u64) -> Complex64 {
    if n <= ROOT_TABLE_LIMIT {
        root_table(n)[(j % n) as usize]
    } else {
        root_direct(j, n)
    }
}

/// A root of unity `e(num/den)` kept exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Root {
    pub num: u64,
    pub den: u64,
}

impl std::ops::Mul for Root {
    type Output = Root;

    fn mul(self, o: Root) -> Root {
        let l = lcm(self.den, o.den);
        let a = (self.num as u128 * (l / self.den) as u128 + o.num as u128 * (l / o.den) as u128)
            % l as u128;
        Root::new(a as u64, l)
    }
}

impl Root {
    pub const ONE: Root = Root { num: 0, den: 1 };

    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0);
        let num = num % den;
        let g = num.gcd(&den);
        Self {
            num: num / g,
            den: den / g,
        }
    }

    pub fn value(self) -> Complex64 {
        root_of_unity(self.num, self.den)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    let l = (a as u128 / a.gcd(&b) as u128) * b as u128;
    u64::try_from(l).expect("root order overflow")
}

/// An exact sum of roots of unity `Σ_j counts[j]·e(j/N)` with a float mirror.
///
/// Count vectors are not a canonical form (cyclotomic relations), so values
/// reached by different routes are compared through [`SumValue::approx`].
#[derive(Clone, Debug, PartialEq)]
pub struct SumValue {
    order: u64,
    counts: Vec<(u64, i64)>,
    approx: Complex64,
    weight: u64,
}

impl SumValue {
    pub fn zero() -> Self {
        Self {
            order: 1,
            counts: Vec::new(),
            approx: Complex64::new(0.0, 0.0),
            weight: 0,
        }
    }

    pub fn one() -> Self {
        Self::from_sparse(1, vec![(0, 1)])
    }

    /// `k·e(root)`.
    pub fn single(root: Root, k: i64) -> Self {
        Self::from_sparse(root.den, vec![(root.num, k)])
    }

    /// From a dense count vector of length `order`.
    pub fn from_dense(order: u64, dense: &[i64]) -> Self {
        assert_eq!(dense.len() as u64, order);
        Self::finish(
            order,
            dense
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(j, &c)| (j as u64, c))
                .collect(),
        )
    }

    /// From `(index, count)` pairs in any order, duplicates allowed.
    pub fn from_sparse(order: u64, mut pairs: Vec<(u64, i64)>) -> Self {
        assert!(order > 0);
        for e in &mut pairs {
            e.0 %= order;
        }
        pairs.sort_unstable_by_key(|e| e.0);
        let mut merged: Vec<(u64, i64)> = Vec::with_capacity(pairs.len());
        for (j, c) in pairs {
            match merged.last_mut() {
                Some(last) if last.0 == j => last.1 += c,
                _ => merged.push((j, c)),
            }
        }
        merged.retain(|e| e.1 != 0);
        Self::finish(order, merged)
    }

    fn finish(order: u64, counts: Vec<(u64, i64)>) -> Self {
        let approx = if order <= ROOT_TABLE_LIMIT {
            let table = root_table(order);
            counts
                .iter()
                .map(|&(j, c)| table[j as usize] * c as f64)
                .sum()
        } else {
            counts
                .iter()
                .map(|&(j, c)| root_direct(j, order) * c as f64)
                .sum()
        };
        let weight = counts.iter().map(|e| e.1.unsigned_abs()).sum();
        Self {
            order,
            counts,
            approx,
            weight,
        }
    }

    /// Root order `N`.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// Nonzero `(j, count)` pairs in increasing `j`.
    pub fn counts(&self) -> &[(u64, i64)] {
        &self.counts
    }

    /// `Σ counts`; for a brute-force value this is the size of the domain.
    pub fn total(&self) -> i64 {
        self.counts.iter().map(|e| e.1).sum()
    }

    /// `Σ |counts|`, the number of roots summed.
    pub fn weight(&self) -> u64 {
        self.weight
    }

    pub fn approx(&self) -> Complex64 {
        self.approx
    }

    pub fn magnitude(&self) -> f64 {
        self.approx.norm()
    }

    /// Bound on `|approx - exact|`.
    pub fn error_bound(&self) -> f64 {
        self.weight as f64 * 2f64.powi(-50)
    }

    /// Re-expresses the value over a multiple of its order.
    pub fn lift(&self, order: u64) -> Self {
        assert_eq!(order % self.order, 0, "lift to a non-multiple order");
        let k = order / self.order;
        Self {
            order,
            counts: self.counts.iter().map(|&(j, c)| (j * k, c)).collect(),
            approx: self.approx,
            weight: self.weight,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = lcm(self.order, o.order);
        let (ka, kb) = (n / self.order, n / o.order);
        let mut a = self.counts.iter().map(|&(j, c)| (j * ka, c)).peekable();
        let mut b = o.counts.iter().map(|&(j, c)| (j * kb, c)).peekable();
        let mut merged = Vec::with_capacity(self.counts.len() + o.counts.len());
        loop {
            let next = match (a.peek(), b.peek()) {
                (Some(x), Some(y)) if x.0 == y.0 => {
                    let (x, y) = (a.next().unwrap(), b.next().unwrap());
                    (x.0, x.1 + y.1)
                }
                (Some(x), Some(y)) if x.0 < y.0 => a.next().unwrap(),
                (_, Some(_)) => b.next().unwrap(),
                (Some(_), None) => a.next().unwrap(),
                (None, None) => break,
            };
            if next.1 != 0 {
                merged.push(next);
            }
        }
        Self::finish(n, merged)
    }

    pub fn scale(&self, k: i64) -> Self {
        Self::from_sparse(
            self.order,
            self.counts.iter().map(|&(j, c)| (j, c * k)).collect(),
        )
    }

    /// Multiplies by the root of unity `e(root)`.
    pub fn mul_root(&self, root: Root) -> Self {
        let n = lcm(self.order, root.den);
        let shift = root.num * (n / root.den);
        let k = n / self.order;
        Self::from_sparse(
            n,
            self.counts
                .iter()
                .map(|&(j, c)| ((j * k + shift) % n, c))
                .collect(),
        )
    }

    /// Product of two sums (convolution of count vectors).
    pub fn mul(&self, o: &Self) -> Self {
        let n = lcm(self.order, o.order);
        let (ka, kb) = (n / self.order, n / o.order);
        let pairs = self
            .counts
            .iter()
            .flat_map(|&(i, a)| {
                o.counts
                    .iter()
                    .map(move |&(j, b)| (((i * ka) as u128 + (j * kb) as u128) as u64 % n, a * b))
            })
            .collect();
        Self::from_sparse(n, pairs)
    }

    /// Whether two values agree within `tol` plus both error bounds.
    pub fn close_to(&self, o: &Self, tol: f64) -> bool {
        (self.approx - o.approx).norm() <= tol + self.error_bound() + o.error_bound()
    }
}

impl fmt::Display for SumValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:.12} {:+.12}i (|S| = {:.12})",
            self.approx.re,
            self.approx.im,
            self.magnitude()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_and_arithmetic() {
        let a = SumValue::from_sparse(4, vec![(1, 1), (1, 1), (3, 0)]);
        assert_eq!(a.counts(), &[(1, 2)]);
        assert!((a.approx() - Complex64::new(0.0, 2.0)).norm() < 1e-12);
        let b = a.mul_root(Root::new(1, 4));
        assert!((b.approx() + Complex64::new(2.0, 0.0)).norm() < 1e-12);
        let c = a.add(&SumValue::single(Root::new(1, 3), 1));
        assert_eq!(c.order(), 12);
        assert!((c.approx() - (a.approx() + root_of_unity(1, 3))).norm() < 1e-12);
        let d = a.mul(&a);
        assert!((d.approx() + Complex64::new(4.0, 0.0)).norm() < 1e-12);
        assert_eq!(Root::new(2, 4) * Root::new(1, 6), Root::new(2, 3));
    }

    #[test]
    fn sum_of_all_roots_vanishes_in_mirror_only() {
        let v = SumValue::from_dense(5, &[1, 1, 1, 1, 1]);
        assert_eq!(v.total(), 5);
        assert!(v.magnitude() < 1e-12);
        assert!(v.close_to(&SumValue::zero(), 1e-12));
    }
}
