//! Z[ζ_{p^m}] (and its p-adic truncations) in the power basis 1, ζ, ...,
//! ζ^(φ-1), φ = φ(p^m).

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::{Signed, Zero};

use crate::error::Result;
use crate::series::Ring;

use super::{PadicInt, Valuation};

#[derive(Debug, Clone, PartialEq)]
pub struct Cyc<C> {
    pub p: u64,
    pub m: u32,
    coeffs: Vec<C>,
}

pub type CycInt = Cyc<BigInt>;
pub type CycMod = Cyc<PadicInt>;

pub fn phi(p: u64, m: u32) -> usize {
    if m == 0 {
        1
    } else {
        ((p - 1) * p.pow(m - 1)) as usize
    }
}

impl<C: Ring> Cyc<C> {
    pub fn zero(p: u64, m: u32, template: &C) -> Self {
        Cyc { p, m, coeffs: vec![template.zero_like(); phi(p, m)] }
    }

    pub fn from_scalar(p: u64, m: u32, c: C) -> Self {
        let mut z = Cyc::zero(p, m, &c);
        z.coeffs[0] = c;
        z
    }

    /// c ζ^e for any integer exponent e.
    pub fn monomial(p: u64, m: u32, e: i64, c: C) -> Self {
        let order = p.pow(m) as i64;
        let e = e.rem_euclid(order) as usize;
        let mut v = vec![c.zero_like(); e + 1];
        v[e] = c;
        Cyc::from_poly(p, m, v)
    }

    /// Reduce an arbitrary polynomial in ζ modulo the cyclotomic polynomial.
    pub fn from_poly(p: u64, m: u32, mut v: Vec<C>) -> Self {
        let ph = phi(p, m);
        let order = p.pow(m) as usize;
        let zero = v[0].zero_like();
        // first fold exponents mod p^m, then use ζ^φ = -sum_{j<p-1} ζ^(j p^(m-1))
        if v.len() > order {
            for i in order..v.len() {
                let c = std::mem::replace(&mut v[i], zero.clone());
                v[i % order] = v[i % order].add(&c);
            }
            v.truncate(order);
        }
        if m == 0 {
            let s = v.iter().fold(zero.clone(), |a, c| a.add(c));
            return Cyc { p, m, coeffs: vec![s] };
        }
        let step = p.pow(m - 1) as usize;
        for e in (ph..v.len()).rev() {
            let c = std::mem::replace(&mut v[e], zero.clone());
            if c.is_zero() {
                continue;
            }
            for j in 0..(p as usize - 1) {
                let t = e - ph + j * step;
                v[t] = v[t].sub(&c);
            }
        }
        v.resize(ph, zero);
        Cyc { p, m, coeffs: v }
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    pub fn map<D: Ring, F: Fn(&C) -> D>(&self, f: F) -> Cyc<D> {
        Cyc { p: self.p, m: self.m, coeffs: self.coeffs.iter().map(f).collect() }
    }

    /// Galois conjugate ζ -> ζ^c, c prime to p.
    pub fn conjugate(&self, c: u64) -> Self {
        let order = self.p.pow(self.m) as usize;
        let zero = self.coeffs[0].zero_like();
        let mut v = vec![zero; order.max(1)];
        for (e, x) in self.coeffs.iter().enumerate() {
            let t = (e * c as usize) % order.max(1);
            v[t] = v[t].add(x);
        }
        Cyc::from_poly(self.p, self.m, v)
    }

    /// Scalar part if every non-constant coordinate vanishes.
    pub fn as_scalar(&self) -> Option<&C> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }
}

impl<C: Ring> Ring for Cyc<C> {
    fn zero_like(&self) -> Self {
        Cyc { p: self.p, m: self.m, coeffs: self.coeffs.iter().map(|c| c.zero_like()).collect() }
    }
    fn one_like(&self) -> Self {
        Cyc::from_scalar(self.p, self.m, self.coeffs[0].one_like())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
    fn add(&self, o: &Self) -> Self {
        Cyc { p: self.p, m: self.m, coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.add(b)).collect() }
    }
    fn sub(&self, o: &Self) -> Self {
        Cyc { p: self.p, m: self.m, coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.sub(b)).collect() }
    }
    fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }
    fn mul(&self, o: &Self) -> Self {
        assert_eq!((self.p, self.m), (o.p, o.m), "cyclotomic level mismatch");
        let n = self.rank();
        let mut v = vec![self.coeffs[0].zero_like(); 2 * n - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    v[i + j] = v[i + j].add(&a.mul(b));
                }
            }
        }
        Cyc::from_poly(self.p, self.m, v)
    }
    fn mul_int(&self, n: i64) -> Self {
        self.map(|c| c.mul_int(n))
    }
    fn div_int(&self, n: u64) -> Result<Self> {
        let coeffs = self.coeffs.iter().map(|c| c.div_int(n)).collect::<Result<Vec<_>>>()?;
        Ok(Cyc { p: self.p, m: self.m, coeffs })
    }
    fn reduce_prec(&self, n: u32) -> Self {
        self.map(|c| c.reduce_prec(n))
    }
    fn precision(&self) -> Option<u32> {
        self.coeffs.iter().filter_map(|c| c.precision()).min()
    }
}

/// Determinant by fraction-free Gaussian elimination.
pub(crate) fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut sign = 1i32;
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if Zero::is_zero(&a[k][k]) {
            match (k + 1..n).find(|&r| !Zero::is_zero(&a[r][k])) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

impl CycInt {
    /// Norm down to Q: determinant of multiplication by self.
    pub fn norm(&self) -> BigInt {
        let n = self.rank();
        let mut cols = Vec::with_capacity(n);
        let mut basis = Cyc::from_scalar(self.p, self.m, BigInt::from(1));
        let zeta = Cyc::monomial(self.p, self.m, 1, BigInt::from(1));
        for _ in 0..n {
            cols.push(self.mul(&basis).coeffs);
            basis = basis.mul(&zeta);
        }
        let mat = (0..n).map(|r| (0..n).map(|c| cols[c][r].clone()).collect()).collect();
        bareiss_det(mat)
    }

    /// Valuation in units of a uniformizer ζ - 1 (totally ramified of degree φ).
    pub fn valuation(&self) -> Valuation {
        if Ring::is_zero(self) {
            return Valuation::Infinite;
        }
        let nrm = self.norm().abs();
        let mut v = 0i64;
        let mut x = nrm;
        let p = BigInt::from(self.p);
        while Zero::is_zero(&(&x % &p)) {
            x /= &p;
            v += 1;
        }
        Valuation::Exact(Rational64::from(v))
    }

    pub fn to_mod(&self, prec: u32) -> CycMod {
        self.map(|c| PadicInt::from_bigint(c, self.p, prec))
    }
}

impl CycMod {
    /// Valuation in units of ζ - 1, saturating at φ times the declared precision.
    pub fn valuation(&self) -> Valuation {
        let prec = Ring::precision(self).unwrap_or(0);
        let cap = Rational64::from(phi(self.p, self.m) as i64 * prec as i64);
        let lifted: CycInt = self.map(|c| BigInt::from(c.signed()));
        match lifted.valuation() {
            Valuation::Exact(v) if v < cap => Valuation::Exact(v),
            _ => Valuation::AtLeast(cap),
        }
    }
}

/// v_p(ζ - 1) = 1/φ(p^m).
pub fn uniformizer_valuation(p: u64, m: u32) -> Rational64 {
    Rational64::new(1, phi(p, m) as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ci(p: u64, m: u32, v: &[i64]) -> CycInt {
        Cyc::from_poly(p, m, v.iter().map(|&x| BigInt::from(x)).collect())
    }

    #[test]
    fn reduction_and_powers() {
        // ζ_4: ζ^2 = -1
        let z = ci(2, 2, &[0, 1]);
        assert_eq!(z.mul(&z), ci(2, 2, &[-1, 0]));
        // ζ_9^9 = 1
        let z9 = Cyc::monomial(3, 2, 1, BigInt::from(1));
        let mut acc = z9.one_like();
        for _ in 0..9 {
            acc = acc.mul(&z9);
        }
        assert_eq!(acc, z9.one_like());
        // sum of all p^m-th roots of unity is 0
        let s = (0..9).fold(z9.zero_like(), |a, e| a.add(&Cyc::monomial(3, 2, e, BigInt::from(1))));
        assert!(Ring::is_zero(&s));
    }

    #[test]
    fn norms() {
        // N(ζ - 1) = ±p for every level
        for &(p, m) in &[(2u64, 1u32), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1)] {
            let pi = Cyc::monomial(p, m, 1, BigInt::from(1)).sub(&Cyc::from_scalar(p, m, BigInt::from(1)));
            assert_eq!(pi.norm().abs(), BigInt::from(p));
            assert_eq!(pi.valuation(), Valuation::Exact(Rational64::from(1)));
            let pp = Cyc::from_scalar(p, m, BigInt::from(p));
            assert_eq!(pp.valuation(), Valuation::Exact(Rational64::from(phi(p, m) as i64)));
        }
        assert_eq!(ci(3, 1, &[2, 1]).norm(), BigInt::from(3));
    }

    #[test]
    fn conjugation_is_automorphism() {
        let a = ci(3, 2, &[1, 2, 0, -1, 4, 0]);
        let b = ci(3, 2, &[0, 1, 1, 0, 0, 3]);
        for c in [1u64, 2, 4, 5, 7, 8] {
            assert_eq!(a.mul(&b).conjugate(c), a.conjugate(c).mul(&b.conjugate(c)));
            assert_eq!(a.conjugate(c).norm(), a.norm());
        }
    }

    #[test]
    fn bareiss_matches_cofactor() {
        let m: Vec<Vec<BigInt>> = vec![vec![2, 0, 1], vec![1, 3, 2], vec![1, 1, 1]]
            .into_iter()
            .map(|r| r.into_iter().map(BigInt::from).collect())
            .collect();
        // 2(3-2) - 0 + 1(1-3) = 0
        assert_eq!(bareiss_det(m), BigInt::zero());
        let m: Vec<Vec<BigInt>> =
            vec![vec![0, 2], vec![3, 1]].into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect();
        assert_eq!(bareiss_det(m), BigInt::from(-6));
    }

    #[test]
    fn truncated_valuation_saturates() {
        let z = ci(2, 2, &[4, 0]).to_mod(2);
        assert_eq!(z.valuation(), Valuation::AtLeast(Rational64::from(4)));
        let z = ci(2, 2, &[2, 0]).to_mod(3);
        assert_eq!(z.valuation(), Valuation::Exact(Rational64::from(2)));
    }

    #[test]
    fn small_levels() {
        let z = Cyc::monomial(2, 1, 1, BigInt::from(1));
        assert_eq!(z.rank(), 1);
        assert_eq!(z.coeffs()[0], BigInt::from(-1));
        assert_eq!(z.add(&z.one_like()).valuation(), Valuation::Infinite);
        let i = ci(2, 2, &[0, 1]);
        assert_eq!(i.conjugate(3), ci(2, 2, &[0, -1]));
        let a = ci(3, 1, &[2, 1]);
        let b = ci(3, 1, &[3, -1]);
        let va = a.valuation().value().unwrap();
        let vb = b.valuation().value().unwrap();
        assert_eq!(a.mul(&b).valuation(), Valuation::Exact(va + vb));
    }
}
