//! Finite fields F_p[u]/(h(u)) with a deterministic choice of modulus.
//!
//! F_{q^k} = F_{p^{ak}} is always realised with the modulus returned by
//! [`find_irreducible`]; the coefficient field F_q is embedded through the
//! smallest root of its own modulus, see [`embed_base`].

use crate::error::{Error, Result};

/// Polynomial over F_p, little-endian coefficients.
pub type FpPoly = Vec<u64>;

fn trim(mut a: FpPoly) -> FpPoly {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
    a
}

fn is_zero_poly(a: &[u64]) -> bool {
    a.iter().all(|&c| c == 0)
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // p is prime and small, Fermat is fine here
    let mut r = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Remainder of `a` modulo a monic or non-monic nonzero `m`.
fn poly_rem(a: &[u64], m: &[u64], p: u64) -> FpPoly {
    let m = trim(m.to_vec());
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    let mut r = trim(a.to_vec());
    while r.len() > dm && !(r.len() == 1 && r[0] == 0) {
        let dr = r.len() - 1;
        let c = r[dr] * lead_inv % p;
        if c != 0 {
            for i in 0..=dm {
                let t = c * m[i] % p;
                r[dr - dm + i] = (r[dr - dm + i] + p - t) % p;
            }
        }
        r.pop();
        r = trim(r);
        if dm == 0 {
            return vec![0];
        }
    }
    r
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> FpPoly {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    poly_rem(&prod, m, p)
}

fn poly_powmod(base: &[u64], mut e: u128, m: &[u64], p: u64) -> FpPoly {
    let mut result: FpPoly = vec![1];
    let mut b = poly_rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            result = poly_mulmod(&result, &b, m, p);
        }
        b = poly_mulmod(&b, &b, m, p);
        e >>= 1;
    }
    result
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !is_zero_poly(&y) {
        let r = poly_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

fn poly_sub(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(out)
}

/// Rabin's test: u^{p^n} = u mod h and gcd(u^{p^{n/l}} - u, h) = 1 for primes l | n.
pub fn is_irreducible(p: u64, h: &[u64]) -> bool {
    let h = trim(h.to_vec());
    let n = h.len() - 1;
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let u: FpPoly = vec![0, 1];
    let frob_pow = |k: usize| {
        let mut x = u.clone();
        for _ in 0..k {
            x = poly_powmod(&x, p as u128, &h, p);
        }
        x
    };
    if poly_sub(&frob_pow(n), &u, p) != vec![0] {
        return false;
    }
    for l in crate::nt::prime_factors(n as u64) {
        let g = poly_gcd(&h, &poly_sub(&frob_pow(n / l as usize), &u, p), p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// First monic irreducible of degree `n` over F_p, scanning the lower
/// coefficients as a base-p counter with the constant term varying fastest.
pub fn find_irreducible(p: u64, n: usize) -> FpPoly {
    assert!(n >= 1);
    let mut lower = vec![0u64; n];
    loop {
        let mut cand = lower.clone();
        cand.push(1);
        if is_irreducible(p, &cand) {
            return cand;
        }
        // increment base-p counter
        let mut i = 0;
        loop {
            lower[i] += 1;
            if lower[i] < p {
                break;
            }
            lower[i] = 0;
            i += 1;
            assert!(i < n, "no irreducible found");
        }
    }
}

/// Element of F_p[u]/(h), `n` residues little-endian in u.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FqElt(pub Vec<u64>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseEmbedding {
    pub a: usize,
    pub base_modulus: FpPoly,
    /// Image of the class of u from F_p[u]/(base_modulus).
    pub root: FqElt,
}

/// F_{p^n} presented as F_p[u]/(h).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldCtx {
    pub p: u64,
    pub n: usize,
    pub modulus: FpPoly,
    pub base: Option<BaseEmbedding>,
}

impl FieldCtx {
    pub fn new(p: u64, n: usize) -> Self {
        FieldCtx { p, n, modulus: find_irreducible(p, n), base: None }
    }

    /// F_{q^k} with q = p^a, carrying the embedding of F_q.
    pub fn for_extension(p: u64, a: usize, k: usize) -> Result<Self> {
        let mut ctx = FieldCtx::new(p, a * k);
        let base_modulus = find_irreducible(p, a);
        let root = embed_base(&ctx, &base_modulus)?;
        ctx.base = Some(BaseEmbedding { a, base_modulus, root });
        Ok(ctx)
    }

    pub fn size(&self) -> u128 {
        crate::nt::pow_u128(self.p, self.n as u32)
    }

    pub fn zero(&self) -> FqElt {
        FqElt(vec![0; self.n])
    }

    pub fn one(&self) -> FqElt {
        self.constant(1)
    }

    pub fn constant(&self, c: u64) -> FqElt {
        let mut v = vec![0; self.n];
        v[0] = c % self.p;
        FqElt(v)
    }

    /// Element with base-p digits of `index` as coefficients, constant term least significant.
    pub fn from_index(&self, mut index: u128) -> FqElt {
        let p = self.p as u128;
        let v = (0..self.n)
            .map(|_| {
                let c = (index % p) as u64;
                index /= p;
                c
            })
            .collect();
        FqElt(v)
    }

    pub fn index_of(&self, x: &FqElt) -> u128 {
        x.0.iter().rev().fold(0u128, |acc, &c| acc * self.p as u128 + c as u128)
    }

    /// Every element once, lexicographic with the constant term fastest, 0 first.
    pub fn enumerate(&self) -> impl Iterator<Item = FqElt> + '_ {
        (0..self.size()).map(move |i| self.from_index(i))
    }

    pub fn is_zero(&self, x: &FqElt) -> bool {
        x.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, x: &FqElt, y: &FqElt) -> FqElt {
        FqElt(x.0.iter().zip(&y.0).map(|(a, b)| (a + b) % self.p).collect())
    }

    pub fn sub(&self, x: &FqElt, y: &FqElt) -> FqElt {
        FqElt(x.0.iter().zip(&y.0).map(|(a, b)| (a + self.p - b) % self.p).collect())
    }

    pub fn neg(&self, x: &FqElt) -> FqElt {
        FqElt(x.0.iter().map(|a| (self.p - a) % self.p).collect())
    }

    pub fn scale(&self, c: u64, x: &FqElt) -> FqElt {
        FqElt(x.0.iter().map(|a| a * (c % self.p) % self.p).collect())
    }

    pub fn mul(&self, x: &FqElt, y: &FqElt) -> FqElt {
        let p = self.p;
        let n = self.n;
        let mut prod = vec![0u64; 2 * n - 1];
        for (i, &a) in x.0.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in y.0.iter().enumerate() {
                prod[i + j] = (prod[i + j] + a * b) % p;
            }
        }
        // h is monic: u^n = -(h_0 + ... + h_{n-1} u^{n-1})
        for top in (n..prod.len()).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            for i in 0..n {
                let t = c * self.modulus[i] % p;
                prod[top - n + i] = (prod[top - n + i] + p - t) % p;
            }
        }
        prod.truncate(n);
        FqElt(prod)
    }

    pub fn try_mul(&self, x: &FqElt, y: &FqElt) -> Result<FqElt> {
        if x.0.len() != self.n || y.0.len() != self.n {
            return Err(Error::CtxMismatch);
        }
        Ok(self.mul(x, y))
    }

    pub fn try_add(&self, x: &FqElt, y: &FqElt) -> Result<FqElt> {
        if x.0.len() != self.n || y.0.len() != self.n {
            return Err(Error::CtxMismatch);
        }
        Ok(self.add(x, y))
    }

    pub fn pow(&self, x: &FqElt, mut e: u128) -> FqElt {
        let mut result = self.one();
        let mut b = x.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(&result, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        result
    }

    pub fn frobenius(&self, x: &FqElt) -> FqElt {
        self.pow(x, self.p as u128)
    }

    /// Absolute trace to F_p.
    pub fn trace(&self, x: &FqElt) -> u64 {
        let mut acc = self.zero();
        let mut y = x.clone();
        for _ in 0..self.n {
            acc = self.add(&acc, &y);
            y = self.frobenius(&y);
        }
        debug_assert!(acc.0[1..].iter().all(|&c| c == 0));
        acc.0[0]
    }

    /// Evaluate an F_p-polynomial at `x`.
    pub fn eval_fp_poly(&self, poly: &[u64], x: &FqElt) -> FqElt {
        poly.iter().rev().fold(self.zero(), |acc, &c| self.add(&self.mul(&acc, x), &self.constant(c)))
    }

    /// Image of an F_q element, given by its `a` coordinates in the basis
    /// 1, r, ..., r^{a-1} of the embedded base field.
    pub fn embed(&self, coords: &[u64]) -> FqElt {
        let base = self.base.as_ref().expect("context has no base embedding");
        let mut acc = self.zero();
        let mut power = self.one();
        for &c in coords.iter().take(base.a) {
            acc = self.add(&acc, &self.scale(c, &power));
            power = self.mul(&power, &base.root);
        }
        acc
    }

    /// Smallest generator of the multiplicative group in enumeration order.
    pub fn primitive_element(&self) -> FqElt {
        let order = self.size() - 1;
        if order == 1 {
            return self.one();
        }
        let primes = crate::nt::prime_factors(order as u64);
        (2..self.size())
            .map(|i| self.from_index(i))
            .find(|g| primes.iter().all(|&l| self.pow(g, order / l as u128) != self.one()))
            .expect("multiplicative group is cyclic")
    }
}

/// Smallest root, in enumeration order, of `base_modulus` inside `ctx`.
pub fn embed_base(ctx: &FieldCtx, base_modulus: &[u64]) -> Result<FqElt> {
    let a = base_modulus.len() - 1;
    if a == 0 || !ctx.n.is_multiple_of(a) {
        return Err(Error::NoRoot);
    }
    ctx.enumerate().find(|x| ctx.is_zero(&ctx.eval_fp_poly(base_modulus, x))).ok_or(Error::NoRoot)
}
