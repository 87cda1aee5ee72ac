//! Z_q / p^E realized as (Z/p^E)[u] / H(u), H the naive lift of the
//! F_q modulus.

use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FqElt};

use super::{Modulus, PadicInt};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ZqElt(pub Vec<u64>);

#[derive(Debug, Clone)]
pub struct ZqCtx {
    pub m: Modulus,
    pub n: usize,
    /// Low coefficients h_0..h_{n-1} of the monic lift H.
    h: Vec<u64>,
    /// tr[j] = Tr(u^j) for j < n.
    tr: Vec<u64>,
}

impl ZqCtx {
    pub fn new(field: &FieldCtx, prec: u32) -> Result<Self> {
        let m = Modulus::new(field.p, prec)?;
        let n = field.n;
        let h = field.modulus[..n].to_vec();
        let mut ctx = ZqCtx { m, n, h, tr: vec![0; n] };
        ctx.tr = ctx.trace_functional();
        Ok(ctx)
    }

    /// Tr(u^j) = sum_i [u^i](u^(i+j) mod H).
    fn trace_functional(&self) -> Vec<u64> {
        let n = self.n;
        let mut pw = Vec::with_capacity(2 * n);
        let mut cur = self.one();
        for _ in 0..2 * n {
            pw.push(cur.clone());
            cur = self.mul_by_u(&cur);
        }
        (0..n).map(|j| (0..n).fold(0u64, |acc, i| self.m.add(acc, pw[i + j].0[i]))).collect()
    }

    pub fn trace_vector(&self) -> &[u64] {
        &self.tr
    }

    pub fn zero(&self) -> ZqElt {
        ZqElt(vec![0; self.n])
    }

    pub fn one(&self) -> ZqElt {
        let mut v = vec![0; self.n];
        v[0] = 1 % self.m.pe;
        ZqElt(v)
    }

    pub fn lift(&self, x: &FqElt) -> ZqElt {
        ZqElt(x.0.iter().map(|&c| c % self.m.pe).collect())
    }

    pub fn reduce(&self, x: &ZqElt) -> FqElt {
        FqElt(x.0.iter().map(|&c| c % self.m.p).collect())
    }

    pub fn add(&self, a: &ZqElt, b: &ZqElt) -> ZqElt {
        ZqElt(a.0.iter().zip(&b.0).map(|(&x, &y)| self.m.add(x, y)).collect())
    }

    fn mul_by_u(&self, a: &ZqElt) -> ZqElt {
        let n = self.n;
        let top = a.0[n - 1];
        let mut out = vec![0u64; n];
        for i in (1..n).rev() {
            out[i] = a.0[i - 1];
        }
        for (o, &hi) in out.iter_mut().zip(&self.h) {
            *o = self.m.sub(*o, self.m.mul(top, hi));
        }
        ZqElt(out)
    }

    pub fn mul(&self, a: &ZqElt, b: &ZqElt) -> ZqElt {
        let n = self.n;
        let mut r = vec![0u64; 2 * n - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                r[i + j] = self.m.add(r[i + j], self.m.mul(x, y));
            }
        }
        for i in (n..2 * n - 1).rev() {
            let c = r[i];
            if c == 0 {
                continue;
            }
            for j in 0..n {
                r[i - n + j] = self.m.sub(r[i - n + j], self.m.mul(c, self.h[j]));
            }
        }
        r.truncate(n);
        ZqElt(r)
    }

    pub fn pow(&self, a: &ZqElt, mut e: u128) -> ZqElt {
        let mut r = self.one();
        let mut b = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        r
    }

    /// Teichmüller lift of x: the unique root of unity (or 0) reducing to x.
    pub fn teichmuller(&self, x: &FqElt) -> ZqElt {
        let q = (self.m.p as u128).pow(self.n as u32);
        let mut z = self.lift(x);
        for _ in 0..self.m.e {
            z = self.pow(&z, q);
        }
        z
    }

    /// Trace to Z_p via the linear functional.
    pub fn trace(&self, a: &ZqElt) -> PadicInt {
        let v = a.0.iter().zip(&self.tr).fold(0u64, |acc, (&x, &t)| self.m.add(acc, self.m.mul(x, t)));
        PadicInt::from_modulus(v, &self.m)
    }
}

/// Reference evaluation of Tr(sum_i ω(b_i) ω(x)^i) as a sum of Frobenius
/// conjugates ω(.)^(p^j); slow but independent of the trace functional.
pub fn teich_trace(field: &FieldCtx, zq: &ZqCtx, x: &FqElt, coeffs: &[FqElt]) -> Result<PadicInt> {
    let wx = zq.teichmuller(x);
    let mut total = zq.zero();
    let mut wxi = zq.one();
    for b in coeffs {
        let m_i = zq.mul(&zq.teichmuller(b), &wxi);
        let mut conj = m_i;
        for _ in 0..field.n {
            total = zq.add(&total, &conj);
            conj = zq.pow(&conj, zq.m.p as u128);
        }
        wxi = zq.mul(&wxi, &wx);
    }
    if let Some(j) = total.0.iter().skip(1).position(|&c| c != 0) {
        return Err(Error::TraceNotRational(j as u32 + 1));
    }
    Ok(PadicInt::from_modulus(total.0[0], &zq.m))
}
