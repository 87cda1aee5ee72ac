//! Truncated formal power series over a pluggable coefficient ring.
//!
//! A [`Series`] stores exactly `order` coefficients; everything at or past
//! `order` is unknown and never read. Coefficient rings implement [`Ring`],
//! which includes exact division by small integers so that the
//! Newton-identity recurrences behind `exp`/`log` can run in truncated p-adic
//! rings with explicit precision loss.

use std::fmt;

use crate::error::{Error, Result};
use crate::nt;

/// Commutative ring with exact integer division where it is defined.
pub trait Ring: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn mul_int(&self, n: i64) -> Self;
    /// Divide by the positive integer `n`, failing unless the quotient is
    /// determined and integral.
    fn div_int(&self, n: u64) -> Result<Self>;
    /// Multiplicative inverse when `self` is a unit.
    fn try_inv(&self) -> Option<Self> {
        None
    }
    /// Forget p-adic digits past `n`.
    fn reduce_prec(&self, _n: u32) -> Self {
        self.clone()
    }
    /// Number of known p-adic digits, if the ring tracks it.
    fn precision(&self) -> Option<u32> {
        None
    }
}

/// Guard digits needed to divide by every n <= k: v_p(k!).
pub fn guard_digits(p: u64, k: usize) -> u32 {
    nt::val_p_factorial(k as u64, p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    S,
    T,
    W,
    Pi,
    X,
}

#[derive(Clone, PartialEq)]
pub struct Series<R> {
    pub var: Var,
    coeffs: Vec<R>,
}

impl<R: Ring> fmt::Debug for Series<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{:?} + O(^{})", self.var, self.coeffs, self.coeffs.len())
    }
}

impl<R: Ring> Series<R> {
    pub fn new(var: Var, coeffs: Vec<R>) -> Self {
        assert!(!coeffs.is_empty(), "series needs order >= 1");
        Series { var, coeffs }
    }

    /// `c + O(var^order)`.
    pub fn constant(var: Var, c: R, order: usize) -> Self {
        let zero = c.zero_like();
        let mut coeffs = vec![zero; order.max(1)];
        coeffs[0] = c;
        Series { var, coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<R> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &R {
        &self.coeffs[i]
    }

    pub fn set_coeff(&mut self, i: usize, c: R) {
        self.coeffs[i] = c;
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order()).max(1);
        Series { var: self.var, coeffs: self.coeffs[..order].to_vec() }
    }

    /// Pad with zeros up to `order`; only valid when the series is known to be
    /// a polynomial of degree below its current order.
    pub fn extend_exact(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        let zero = coeffs[0].zero_like();
        while coeffs.len() < order {
            coeffs.push(zero.clone());
        }
        Series { var: self.var, coeffs }
    }

    pub fn map<F: Fn(&R) -> R>(&self, f: F) -> Self {
        Series { var: self.var, coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.var != other.var {
            return Err(Error::VarMismatch);
        }
        let n = self.order().min(other.order());
        Ok(Series { var: self.var, coeffs: (0..n).map(|i| self.coeffs[i].add(&other.coeffs[i])).collect() })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        if self.var != other.var {
            return Err(Error::VarMismatch);
        }
        let n = self.order().min(other.order());
        Ok(Series { var: self.var, coeffs: (0..n).map(|i| self.coeffs[i].sub(&other.coeffs[i])).collect() })
    }

    /// Cauchy product truncated at the smaller order.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.var != other.var {
            return Err(Error::VarMismatch);
        }
        let n = self.order().min(other.order());
        let mut out = vec![self.coeffs[0].zero_like(); n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(n - i).enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Ok(Series { var: self.var, coeffs: out })
    }

    pub fn scale(&self, c: &R) -> Self {
        self.map(|x| x.mul(c))
    }

    /// Substitute `var -> c * var`.
    pub fn dilate(&self, c: &R) -> Self {
        let mut pow = c.one_like();
        let mut coeffs = Vec::with_capacity(self.order());
        for x in &self.coeffs {
            coeffs.push(x.mul(&pow));
            pow = pow.mul(c);
        }
        Series { var: self.var, coeffs }
    }

    /// Index of the first nonzero coefficient, if any.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Inverse of a series with unit constant term.
    pub fn inverse(&self) -> Option<Self> {
        let inv0 = self.coeffs[0].try_inv()?;
        let n = self.order();
        let mut out: Vec<R> = Vec::with_capacity(n);
        out.push(inv0.clone());
        for k in 1..n {
            let mut acc = self.coeffs[0].zero_like();
            for i in 1..=k {
                acc = acc.add(&self.coeffs[i].mul(&out[k - i]));
            }
            out.push(acc.mul(&inv0).neg());
        }
        Some(Series { var: self.var, coeffs: out })
    }

    /// F(G) for G with zero constant term, truncated at min(order F, order G).
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if !inner.coeffs[0].is_zero() {
            return Err(Error::InvalidSpec("inner series must vanish at 0".into()));
        }
        let n = self.order().min(inner.order());
        let inner = inner.truncate(n);
        let mut acc = Series::constant(inner.var, self.coeffs[n - 1].clone(), n);
        for k in (0..n - 1).rev() {
            acc = acc.try_mul(&inner)?;
            acc.coeffs[0] = acc.coeffs[0].add(&self.coeffs[k]);
        }
        Ok(acc)
    }

    pub fn reduce_prec_all(&self, n: u32) -> Self {
        self.map(|c| c.reduce_prec(n))
    }

    /// Minimum declared p-adic precision of the coefficients.
    pub fn prec(&self) -> Option<u32> {
        self.coeffs.iter().filter_map(|c| c.precision()).min()
    }
}

impl<R: Ring> Ring for Series<R> {
    fn zero_like(&self) -> Self {
        self.map(|c| c.zero_like())
    }
    fn one_like(&self) -> Self {
        Series::constant(self.var, self.coeffs[0].one_like(), self.order())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
    fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("series variable mismatch")
    }
    fn sub(&self, other: &Self) -> Self {
        self.try_sub(other).expect("series variable mismatch")
    }
    fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }
    fn mul(&self, other: &Self) -> Self {
        self.try_mul(other).expect("series variable mismatch")
    }
    fn mul_int(&self, n: i64) -> Self {
        self.map(|c| c.mul_int(n))
    }
    fn div_int(&self, n: u64) -> Result<Self> {
        let coeffs = self.coeffs.iter().map(|c| c.div_int(n)).collect::<Result<Vec<_>>>()?;
        Ok(Series { var: self.var, coeffs })
    }
    fn try_inv(&self) -> Option<Self> {
        self.inverse()
    }
    fn reduce_prec(&self, n: u32) -> Self {
        self.reduce_prec_all(n)
    }
    fn precision(&self) -> Option<u32> {
        self.prec()
    }
}

/// exp(sum_{k=1}^{K} c_k s^k / k) mod s^{K+1}, via a_n = (1/n) sum_k c_k a_{n-k}.
///
/// Each step divides by n exactly; in truncated p-adic rings this costs
/// v_p(n) digits, so inputs need [`guard_digits`] extra digits.
pub fn exp_from_power_sums<R: Ring>(power_sums: &[R], var: Var) -> Result<Series<R>> {
    assert!(!power_sums.is_empty());
    let big_k = power_sums.len();
    let mut a: Vec<R> = Vec::with_capacity(big_k + 1);
    a.push(power_sums[0].one_like());
    for n in 1..=big_k {
        let mut acc = power_sums[0].zero_like();
        for k in 1..=n {
            if power_sums[k - 1].is_zero() || a[n - k].is_zero() {
                continue;
            }
            acc = acc.add(&power_sums[k - 1].mul(&a[n - k]));
        }
        a.push(acc.div_int(n as u64)?);
    }
    Ok(Series::new(var, a))
}

/// Power sums c_k = k [s^k] log F for F(0) = 1; inverse of [`exp_from_power_sums`].
pub fn power_sums_of<R: Ring>(f: &Series<R>) -> Result<Vec<R>> {
    let n = f.order();
    if f.coeffs[0] != f.coeffs[0].one_like() {
        return Err(Error::InvalidSpec("series must have constant term 1".into()));
    }
    // Newton identities: c_n = n f_n - sum_{k=1}^{n-1} c_k f_{n-k}
    let mut c: Vec<R> = Vec::with_capacity(n.saturating_sub(1));
    for m in 1..n {
        let mut acc = f.coeffs[m].mul_int(m as i64);
        for k in 1..m {
            acc = acc.sub(&c[k - 1].mul(&f.coeffs[m - k]));
        }
        c.push(acc);
    }
    Ok(c)
}

/// log F for F(0) = 1, with l_n = c_n / n.
pub fn log_series<R: Ring>(f: &Series<R>) -> Result<Series<R>> {
    let c = power_sums_of(f)?;
    let mut out = vec![f.coeffs[0].zero_like()];
    for (i, ck) in c.iter().enumerate() {
        out.push(ck.div_int(i as u64 + 1)?);
    }
    Ok(Series::new(f.var, out))
}

/// Compositional inverse G of F (F(0) = 0, F'(0) a unit): F(G(x)) = x.
///
/// Fixed-point iteration G <- G - (F(G) - x) / f_1; each round fixes at
/// least one more coefficient.
pub fn reversion<R: Ring>(f: &Series<R>) -> Result<Series<R>> {
    let n = f.order();
    if !f.coeffs[0].is_zero() {
        return Err(Error::InvalidSpec("reversion needs F(0) = 0".into()));
    }
    if n < 2 {
        return Ok(f.clone());
    }
    let inv1 = f.coeffs[1].try_inv().ok_or(Error::NonUnitLinearTerm)?;
    let zero = f.coeffs[0].zero_like();
    let mut x = vec![zero.clone(); n];
    x[1] = zero.one_like();
    let x = Series::new(f.var, x);
    let mut g = x.scale(&inv1);
    for _ in 0..n {
        let err = f.compose(&g)?.try_sub(&x)?;
        if err.is_zero() {
            return Ok(g);
        }
        g = g.try_sub(&err.scale(&inv1))?;
    }
    let err = f.compose(&g)?.try_sub(&x)?;
    if err.is_zero() {
        Ok(g)
    } else {
        Err(Error::NonUnitLinearTerm)
    }
}
