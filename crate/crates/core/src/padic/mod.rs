//! p-adic integers to fixed precision, unramified extensions, and cyclotomic
//! integers.

mod cyclo;
mod zq;

pub use cyclo::{phi, uniformizer_valuation, Cyc, CycInt, CycMod};
pub use zq::{teich_trace, ZqCtx, ZqElt};

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::nt;
use crate::series::{Ring, Series, Var};

/// Arithmetic in Z / p^e with p^e < 2^63.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Modulus {
    pub p: u64,
    pub e: u32,
    pub pe: u64,
    small: bool,
}

impl Modulus {
    pub fn new(p: u64, e: u32) -> Result<Self> {
        let pe = nt::checked_pow(p, e)
            .filter(|&x| x < (1u64 << 63))
            .ok_or_else(|| Error::InvalidSpec(format!("{p}^{e} exceeds 63 bits")))?;
        Ok(Modulus { p, e, pe, small: pe <= u32::MAX as u64 })
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.pe {
            s - self.pe
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.pe - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.pe - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.small {
            (a * b) % self.pe
        } else {
            ((a as u128 * b as u128) % self.pe as u128) as u64
        }
    }

    pub fn pow(&self, mut b: u64, mut e: u128) -> u64 {
        let mut r = 1 % self.pe;
        b %= self.pe;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    pub fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.pe as i64) as u64
    }

    pub fn from_bigint(&self, v: &BigInt) -> u64 {
        v.mod_floor(&BigInt::from(self.pe)).to_u64().unwrap()
    }

    /// Inverse of a unit.
    pub fn inv(&self, a: u64) -> Option<u64> {
        let a = a % self.pe;
        if self.pe == 1 {
            return Some(0);
        }
        let g = (a as i128).extended_gcd(&(self.pe as i128));
        if g.gcd != 1 {
            return None;
        }
        Some(g.x.rem_euclid(self.pe as i128) as u64)
    }

    /// Signed representative in (-p^e/2, p^e/2].
    pub fn signed(&self, a: u64) -> i64 {
        if a > self.pe / 2 {
            a as i64 - self.pe as i64
        } else {
            a as i64
        }
    }
}

/// Valuation of a quantity known only to finite precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Exact(Rational64),
    /// Known to be at least this; the digits below are all zero.
    AtLeast(Rational64),
    Infinite,
}

impl Valuation {
    pub fn value(&self) -> Option<Rational64> {
        match self {
            Valuation::Exact(v) | Valuation::AtLeast(v) => Some(*v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Valuation::Exact(_))
    }

    pub fn scale(&self, r: Rational64) -> Self {
        match self {
            Valuation::Exact(v) => Valuation::Exact(v * r),
            Valuation::AtLeast(v) => Valuation::AtLeast(v * r),
            Valuation::Infinite => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Exact(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) => write!(f, ">={v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// An element of Z_p known modulo p^prec.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PadicInt {
    value: u64,
    p: u64,
    prec: u32,
    pe: u64,
}

impl fmt::Debug for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {}^{})", self.value, self.p, self.prec)
    }
}

impl PadicInt {
    pub fn new(value: u64, p: u64, prec: u32) -> Self {
        let pe = nt::checked_pow(p, prec).filter(|&x| x < (1u64 << 63)).expect("p^prec exceeds 63 bits");
        PadicInt { value: value % pe, p, prec, pe }
    }

    pub fn from_i64(v: i64, p: u64, prec: u32) -> Self {
        let m = PadicInt::new(0, p, prec);
        PadicInt { value: v.rem_euclid(m.pe as i64) as u64, ..m }
    }

    pub fn from_bigint(v: &BigInt, p: u64, prec: u32) -> Self {
        let m = PadicInt::new(0, p, prec);
        PadicInt { value: v.mod_floor(&BigInt::from(m.pe)).to_u64().unwrap(), ..m }
    }

    pub fn from_modulus(value: u64, m: &Modulus) -> Self {
        PadicInt { value: value % m.pe, p: m.p, prec: m.e, pe: m.pe }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn modulus(&self) -> Modulus {
        Modulus::new(self.p, self.prec).unwrap()
    }

    /// Representative in (-p^prec/2, p^prec/2].
    pub fn signed(&self) -> i64 {
        if self.value > self.pe / 2 {
            self.value as i64 - self.pe as i64
        } else {
            self.value as i64
        }
    }

    pub fn valuation(&self) -> Valuation {
        if self.value == 0 {
            Valuation::AtLeast(Rational64::from(self.prec as i64))
        } else {
            Valuation::Exact(Rational64::from(nt::val_p(self.value, self.p) as i64))
        }
    }

    fn common(&self, o: &Self) -> (u64, u32) {
        debug_assert_eq!(self.p, o.p, "mixed primes");
        if self.prec <= o.prec {
            (self.pe, self.prec)
        } else {
            (o.pe, o.prec)
        }
    }

    fn with(&self, value: u64, pe: u64, prec: u32) -> Self {
        PadicInt { value, p: self.p, prec, pe }
    }
}

#[inline]
fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    if m <= u32::MAX as u64 {
        (a % m) * (b % m) % m
    } else {
        ((a as u128 * b as u128) % m as u128) as u64
    }
}

impl Ring for PadicInt {
    fn zero_like(&self) -> Self {
        self.with(0, self.pe, self.prec)
    }
    fn one_like(&self) -> Self {
        self.with(1 % self.pe, self.pe, self.prec)
    }
    fn is_zero(&self) -> bool {
        self.value == 0
    }
    fn add(&self, o: &Self) -> Self {
        let (pe, prec) = self.common(o);
        self.with(((self.value % pe) + (o.value % pe)) % pe, pe, prec)
    }
    fn sub(&self, o: &Self) -> Self {
        let (pe, prec) = self.common(o);
        self.with(((self.value % pe) + pe - (o.value % pe)) % pe, pe, prec)
    }
    fn neg(&self) -> Self {
        self.with((self.pe - self.value) % self.pe, self.pe, self.prec)
    }
    fn mul(&self, o: &Self) -> Self {
        let (pe, prec) = self.common(o);
        self.with(mulmod(self.value, o.value, pe), pe, prec)
    }
    fn mul_int(&self, n: i64) -> Self {
        let n = n.rem_euclid(self.pe as i64) as u64;
        self.with(mulmod(self.value, n, self.pe), self.pe, self.prec)
    }
    fn div_int(&self, n: u64) -> Result<Self> {
        assert!(n > 0);
        let v = nt::val_p(n, self.p);
        if v > self.prec {
            return Err(Error::InsufficientGuard { have: self.prec, need: v });
        }
        let pv = self.p.pow(v);
        if !self.value.is_multiple_of(pv) {
            return Err(Error::NonIntegralResult(n));
        }
        let prec = self.prec - v;
        let pe = self.pe / pv;
        let m = Modulus { p: self.p, e: prec, pe, small: pe <= u32::MAX as u64 };
        let u_inv = m.inv((n / pv) % pe).expect("unit part is invertible");
        Ok(self.with(m.mul(self.value / pv, u_inv), pe, prec))
    }
    fn try_inv(&self) -> Option<Self> {
        let m = self.modulus();
        m.inv(self.value).map(|v| self.with(v, self.pe, self.prec))
    }
    fn reduce_prec(&self, n: u32) -> Self {
        if n >= self.prec {
            return *self;
        }
        let pe = self.p.pow(n);
        self.with(self.value % pe, pe, n)
    }
    fn precision(&self) -> Option<u32> {
        Some(self.prec)
    }
}

impl Ring for BigInt {
    fn zero_like(&self) -> Self {
        BigInt::zero()
    }
    fn one_like(&self) -> Self {
        BigInt::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn mul_int(&self, n: i64) -> Self {
        self * n
    }
    fn div_int(&self, n: u64) -> Result<Self> {
        let (q, r) = self.div_rem(&BigInt::from(n));
        if Zero::is_zero(&r) {
            Ok(q)
        } else {
            Err(Error::NonIntegralResult(n))
        }
    }
    fn try_inv(&self) -> Option<Self> {
        if self.abs().is_one() {
            Some(self.clone())
        } else {
            None
        }
    }
}

/// Digits lost when truncating (1+T)^t to degree < `order` for a t known
/// mod p^E: coefficients C(t, n) for n < order change by multiples of
/// p^(E - v_p(n)), so floor(log_p(order - 1)) digits suffice.
pub fn binom_guard(p: u64, order: usize) -> u32 {
    if order <= 2 {
        0
    } else {
        nt::floor_log(order as u64 - 1, p)
    }
}

/// (1+T)^t mod T^order, where the exponent t is a p-adic integer.
///
/// Computed by binary powering of the integer lift of t, so no division
/// is needed; the result is declared to precision `prec(t) - binom_guard`.
/// Fails with `InsufficientGuard` when that is below `n_out`.
pub fn binom_pow(t: &PadicInt, order: usize, n_out: u32) -> Result<Series<PadicInt>> {
    let g = binom_guard(t.p, order);
    if t.prec < n_out + g {
        return Err(Error::InsufficientGuard { have: t.prec, need: n_out + g });
    }
    let m = t.modulus();
    let raw = binom_pow_raw(&m, t.value, order);
    Ok(Series::new(Var::T, raw.into_iter().map(|c| PadicInt::new(c, t.p, n_out)).collect()))
}

/// Unit parts and p-adic valuations of 1!, 2!, .., for the falling-factorial kernel.
#[derive(Debug, Clone)]
pub struct FactorialTable {
    inv_unit: Vec<u64>,
    val: Vec<u32>,
}

impl FactorialTable {
    pub fn new(m: &Modulus, order: usize) -> Self {
        let mut inv_unit = vec![1 % m.pe; order.max(1)];
        let mut val = vec![0u32; order.max(1)];
        let mut unit = 1 % m.pe;
        for j in 1..order {
            let (v, u) = split_p(j as u64, m);
            unit = m.mul(unit, u);
            val[j] = val[j - 1] + v;
            inv_unit[j] = m.inv(unit).expect("unit part is invertible");
        }
        FactorialTable { inv_unit, val }
    }
}

fn split_p(mut x: u64, m: &Modulus) -> (u32, u64) {
    let mut v = 0;
    while x.is_multiple_of(m.p) {
        x /= m.p;
        v += 1;
    }
    (v, x % m.pe)
}

/// (1+T)^e mod (p^E, T^order) via C(e, j) = e(e-1)..(e-j+1) / j!, keeping
/// p-parts apart so the division is exact. Agrees with `binom_pow_raw`.
#[allow(clippy::needless_range_loop)]
pub fn binom_falling_raw(m: &Modulus, fact: &FactorialTable, e: u64, order: usize) -> Vec<u64> {
    let mut out = vec![0u64; order.max(1)];
    out[0] = 1 % m.pe;
    let mut unit = 1 % m.pe;
    let mut val = 0u32;
    for j in 1..order {
        let f = e.wrapping_sub(j as u64 - 1);
        if j as u64 > e {
            break;
        }
        let (v, u) = split_p(f, m);
        unit = m.mul(unit, u);
        val += v;
        let shift = val - fact.val[j];
        if shift < m.e {
            out[j] = m.mul(m.mul(unit, fact.inv_unit[j]), m.pow(m.p, shift as u128));
        }
    }
    out
}

/// (1+T)^e mod (p^E, T^order) for a plain integer e.
pub fn binom_pow_raw(m: &Modulus, e: u64, order: usize) -> Vec<u64> {
    let order = order.max(1);
    let mut r = vec![0u64; order];
    r[0] = 1 % m.pe;
    if e == 0 {
        return r;
    }
    let bits = 64 - e.leading_zeros();
    let mut sq = vec![0u64; order];
    for b in (0..bits).rev() {
        // r <- r^2
        sq.iter_mut().for_each(|x| *x = 0);
        for i in 0..order {
            if r[i] == 0 {
                continue;
            }
            for j in 0..order - i {
                sq[i + j] = m.add(sq[i + j], m.mul(r[i], r[j]));
            }
        }
        std::mem::swap(&mut r, &mut sq);
        if (e >> b) & 1 == 1 {
            // r <- r (1 + T)
            for i in (1..order).rev() {
                r[i] = m.add(r[i], r[i - 1]);
            }
        }
    }
    r
}
