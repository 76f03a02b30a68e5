use crate::padic::{inv_mod, mul_mod};

/// Polynomial over `𝔽_p`, lowest degree first, trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpPoly {
    p: u64,
    c: Vec<u64>,
}

impl FpPoly {
    pub fn new(p: u64, mut c: Vec<u64>) -> Self {
        for x in &mut c {
            *x %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        Self { p, c }
    }

    pub fn zero(p: u64) -> Self {
        Self { p, c: Vec::new() }
    }

    pub fn one(p: u64) -> Self {
        Self::new(p, vec![1])
    }

    /// `X - a`.
    pub fn linear(p: u64, a: u64) -> Self {
        Self::new(p, vec![(p - a % p) % p, 1])
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c == [1]
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lc(&self) -> u64 {
        self.c.last().copied().unwrap_or(0)
    }

    pub fn eval(&self, x: u64) -> u64 {
        super::poly::horner_mod(&self.c, x % self.p, self.p)
    }

    pub fn scale(&self, k: u64) -> Self {
        Self::new(
            self.p,
            self.c.iter().map(|&a| mul_mod(a, k, self.p)).collect(),
        )
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(inv_mod(self.lc(), self.p).expect("nonzero leading coefficient"))
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let get = |v: &[u64], i: usize| v.get(i).copied().unwrap_or(0);
        Self::new(
            self.p,
            (0..n)
                .map(|i| (get(&self.c, i) + get(&o.c, i)) % self.p)
                .collect(),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(self.p - 1))
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.p);
        }
        let mut out = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                out[i + j] = (out[i + j] + mul_mod(a, b, self.p)) % self.p;
            }
        }
        Self::new(self.p, out)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(self.p), |acc, _| acc.mul(self))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.p,
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &a)| mul_mod(a, i as u64 % self.p, self.p))
                .collect(),
        )
    }

    /// Quotient and remainder by a nonzero divisor.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let inv = inv_mod(d.lc(), self.p).expect("unit leading coefficient");
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Self::zero(self.p), self.clone());
        }
        let mut q = vec![0u64; r.len() - dd];
        for k in (0..q.len()).rev() {
            let coef = mul_mod(r[k + dd], inv, self.p);
            q[k] = coef;
            if coef == 0 {
                continue;
            }
            for (i, &b) in d.c.iter().enumerate() {
                let t = mul_mod(coef, b, self.p);
                r[k + i] = (r[k + i] + self.p - t) % self.p;
            }
        }
        (Self::new(self.p, q), Self::new(self.p, r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    pub fn div(&self, d: &Self) -> Self {
        self.divrem(d).0
    }

    /// Monic gcd (zero only if both are zero).
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `self^e mod modulus`.
    pub fn pow_mod(&self, mut e: u64, modulus: &Self) -> Self {
        let mut base = self.rem(modulus);
        let mut acc = Self::one(self.p).rem(modulus);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(modulus);
            }
            base = base.mul(&base).rem(modulus);
            e >>= 1;
        }
        acc
    }

    /// For `self = h(X^p)`, returns `h` (the p-th root, since `a^p = a` in `𝔽_p`).
    fn pth_root(&self) -> Self {
        let p = self.p as usize;
        Self::new(self.p, self.c.iter().step_by(p).copied().collect())
    }

    /// Squarefree decomposition of a monic polynomial as `(factor, exponent)`.
    pub fn squarefree(&self) -> Vec<(Self, u32)> {
        let f = self.monic();
        if f.deg() == 0 {
            return Vec::new();
        }
        let fd = f.derivative();
        if fd.is_zero() {
            return f
                .pth_root()
                .squarefree()
                .into_iter()
                .map(|(g, e)| (g, e * self.p as u32))
                .collect();
        }
        let mut out = Vec::new();
        let mut r = f.gcd(&fd);
        let mut w = f.div(&r);
        let mut i = 1;
        while !w.is_one() {
            let y = w.gcd(&r);
            let fac = w.div(&y);
            if !fac.is_one() {
                out.push((fac, i));
            }
            w = y;
            r = r.div(&w);
            i += 1;
        }
        if !r.is_one() {
            out.extend(
                r.pth_root()
                    .squarefree()
                    .into_iter()
                    .map(|(g, e)| (g, e * self.p as u32)),
            );
        }
        out
    }

    /// Complete factorization into monic irreducibles with multiplicities,
    /// sorted, plus the leading coefficient.
    pub fn factor(&self) -> (u64, Vec<(Self, u32)>) {
        let mut out = Vec::new();
        for (g, e) in self.squarefree() {
            for h in berlekamp(&g) {
                out.push((h, e));
            }
        }
        out.sort_by(|a, b| (a.0.deg(), &a.0.c).cmp(&(b.0.deg(), &b.0.c)));
        let mut merged: Vec<(Self, u32)> = Vec::new();
        for (h, e) in out {
            match merged.last_mut() {
                Some(last) if last.0 == h => last.1 += e,
                _ => merged.push((h, e)),
            }
        }
        (self.lc(), merged)
    }

    /// Roots in `𝔽_p` with multiplicity, in increasing order.
    pub fn roots(&self) -> Vec<(u64, u32)> {
        if self.is_zero() {
            return Vec::new();
        }
        if self.p <= 1 << 12 {
            let mut out = Vec::new();
            for a in 0..self.p {
                let lin = Self::linear(self.p, a);
                let mut f = self.clone();
                let mut e = 0;
                while f.eval(a) == 0 && !f.is_zero() {
                    f = f.div(&lin);
                    e += 1;
                }
                if e > 0 {
                    out.push((a, e));
                }
            }
            return out;
        }
        let mut out: Vec<(u64, u32)> = self
            .factor()
            .1
            .into_iter()
            .filter(|(h, _)| h.deg() == 1)
            .map(|(h, e)| ((self.p - h.c[0]) % self.p, e))
            .collect();
        out.sort();
        out
    }
}

/// Splits a squarefree monic polynomial into its monic irreducible factors.
pub fn berlekamp(f: &FpPoly) -> Vec<FpPoly> {
    let p = f.p;
    let n = f.deg();
    if n <= 1 {
        return vec![f.monic()];
    }
    // Rows of Q - I: X^{ip} mod f, minus X^i.
    let xp = FpPoly::new(p, vec![0, 1]).pow_mod(p, f);
    let mut rows = Vec::with_capacity(n);
    let mut cur = FpPoly::one(p);
    for i in 0..n {
        let mut row = vec![0u64; n];
        for (j, &c) in cur.c.iter().enumerate() {
            row[j] = c;
        }
        row[i] = (row[i] + p - 1) % p;
        rows.push(row);
        cur = cur.mul(&xp).rem(f);
    }
    let basis = left_nullspace(&rows, p);
    let k = basis.len();
    if k == 1 {
        return vec![f.monic()];
    }
    let vs: Vec<FpPoly> = basis
        .into_iter()
        .map(|v| FpPoly::new(p, v))
        .filter(|v| v.deg() > 0)
        .collect();
    let mut factors = vec![f.monic()];
    if p <= 1 << 12 {
        for v in &vs {
            if factors.len() == k {
                break;
            }
            let mut next = Vec::new();
            for g in factors {
                if g.deg() <= 1 {
                    next.push(g);
                    continue;
                }
                let mut rest = g;
                for s in 0..p {
                    if rest.deg() <= 1 {
                        break;
                    }
                    let h = rest.gcd(&v.sub(&FpPoly::new(p, vec![s])));
                    if h.deg() > 0 && h.deg() < rest.deg() {
                        rest = rest.div(&h);
                        next.push(h);
                    }
                }
                next.push(rest.monic());
            }
            factors = next;
        }
    } else {
        // Odd large p: gcd with w^{(p-1)/2} - 1 for combinations w of the basis.
        let mut seed = 0x9e37_79b9_7f4a_7c15u64;
        while factors.len() < k {
            let mut w = FpPoly::zero(p);
            for v in &vs {
                seed = seed
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                w = w.add(&v.scale((seed >> 33) % p));
            }
            let mut next = Vec::new();
            for g in factors {
                if g.deg() <= 1 {
                    next.push(g);
                    continue;
                }
                let t = w.pow_mod((p - 1) / 2, &g).sub(&FpPoly::one(p));
                let h = g.gcd(&t);
                if h.deg() > 0 && h.deg() < g.deg() {
                    next.push(g.div(&h).monic());
                    next.push(h);
                } else {
                    next.push(g);
                }
            }
            factors = next;
        }
    }
    factors
}

/// Basis of `{v : v·M = 0}` for a square matrix over `𝔽_p`.
fn left_nullspace(rows: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let n = rows.len();
    // Transpose so the left nullspace of M is the right nullspace of Mᵀ.
    let mut a: Vec<Vec<u64>> = (0..n)
        .map(|j| (0..n).map(|i| rows[i][j]).collect())
        .collect();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(piv) = (r..n).find(|&i| a[i][col] != 0) else {
            continue;
        };
        a.swap(r, piv);
        let inv = inv_mod(a[r][col], p).unwrap();
        for x in &mut a[r] {
            *x = mul_mod(*x, inv, p);
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && row[col] != 0 {
                let factor = row[col];
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x = (*x + p - mul_mod(factor, y, p)) % p;
                }
            }
        }
        pivot_cols.push(col);
        r += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivot_cols.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0u64; n];
            v[fc] = 1;
            for (row, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = (p - a[row][fc]) % p;
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64, c: &[u64]) -> FpPoly {
        FpPoly::new(p, c.to_vec())
    }

    fn product(factors: &[(FpPoly, u32)], p: u64) -> FpPoly {
        factors
            .iter()
            .fold(FpPoly::one(p), |acc, (h, e)| acc.mul(&h.pow(*e)))
    }

    #[test]
    fn factor_small() {
        // x^4 - 1 over F_5 splits completely.
        let f = fp(5, &[4, 0, 0, 0, 1]);
        let (_, fs) = f.factor();
        assert_eq!(fs.len(), 4);
        assert!(fs.iter().all(|(h, e)| h.deg() == 1 && *e == 1));
        // x^2 + 1 is irreducible over F_3.
        assert_eq!(fp(3, &[1, 0, 1]).factor().1, vec![(fp(3, &[1, 0, 1]), 1)]);
    }

    #[test]
    fn factor_with_pth_powers() {
        // (x + 1)^3 (x^2 + x + 2) over F_3; the cube has zero derivative.
        let f = fp(3, &[1, 1]).pow(3).mul(&fp(3, &[2, 1, 1]));
        let (lc, fs) = f.factor();
        assert_eq!(lc, 1);
        assert_eq!(product(&fs, 3), f);
        assert!(fs.contains(&(fp(3, &[1, 1]), 3)));
    }

    #[test]
    fn factor_large_prime() {
        let p = 1_000_003;
        let f = FpPoly::linear(p, 5)
            .mul(&FpPoly::linear(p, 77))
            .mul(&fp(p, &[1, 0, 1]))
            .mul(&FpPoly::linear(p, 5));
        let (_, fs) = f.factor();
        assert_eq!(product(&fs, p), f.monic());
        assert_eq!(f.roots(), vec![(5, 2), (77, 1)]);
    }

    #[test]
    fn roots_multiplicity() {
        let f = fp(5, &[0, 0, 1]).mul(&fp(5, &[4, 1]));
        assert_eq!(f.roots(), vec![(0, 2), (1, 1)]);
    }
}
