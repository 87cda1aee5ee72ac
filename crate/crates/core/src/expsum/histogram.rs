//! Teichmüller trace histograms.
//!
//! With g primitive in F_{q^k} and G = ω(g), every nonzero x is g^e and
//! ω(b_i) ω(x)^i = G^{β_i + i e}, where b_i = g^{β_i}. A single table
//! Tab[e] = Tr(G^e) then gives Tr(f̂(ω(x))) = Σ_i Tab[β_i + i e] for every x.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FqElt};
use crate::padic::{ZqCtx, ZqElt};
use crate::par::{self, Strategy};

use super::TowerSpec;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceHistogram {
    pub p: u64,
    pub k: usize,
    pub n_eff: u32,
    /// Multiplicity of each trace residue mod p^n_eff over F_{q^k}^×.
    pub counts: BTreeMap<u64, u64>,
    /// Trace at x = 0, i.e. Tr(ω(b_0)) over Q_{q^k}.
    pub zero_cell: u64,
}

impl TraceHistogram {
    pub fn mass(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Same histogram with traces reduced to `n` digits.
    pub fn reduce(&self, n: u32) -> Self {
        assert!(n <= self.n_eff);
        let pe = self.p.pow(n);
        let mut counts = BTreeMap::new();
        for (&t, &c) in &self.counts {
            *counts.entry(t % pe).or_insert(0) += c;
        }
        TraceHistogram { p: self.p, k: self.k, n_eff: n, counts, zero_cell: self.zero_cell % pe }
    }
}

/// Discrete logarithm of `b` (in the embedded F_q^×) to base g.
fn base_log(field: &FieldCtx, g: &FqElt, q: u64, b: &FqElt) -> Option<u64> {
    if field.is_zero(b) {
        return None;
    }
    let order = (field.size() - 1) as u64;
    let step = order / (q - 1);
    let gq = field.pow(g, step as u128);
    let mut acc = field.one();
    for j in 0..q - 1 {
        if &acc == b {
            return Some(j * step);
        }
        acc = field.mul(&acc, &gq);
    }
    None
}

/// Characteristic polynomial Π_j (X - G^{p^j}) of a Teichmüller unit G, as
/// coefficients c_0..c_{n-1} of the monic degree-n polynomial over Z/p^e.
fn teich_charpoly(zq: &ZqCtx, gen: &ZqElt) -> Result<Vec<u64>> {
    let m = &zq.m;
    let mut poly = vec![zq.one()];
    let mut root = gen.clone();
    for _ in 0..zq.n {
        let mut next = vec![zq.zero(); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i + 1] = zq.add(&next[i + 1], c);
            let rc = zq.mul(&root, c);
            next[i] = ZqElt(next[i].0.iter().zip(&rc.0).map(|(x, y)| m.sub(*x, *y)).collect());
        }
        poly = next;
        root = zq.pow(&root, m.p as u128);
    }
    poly.pop();
    poly.into_iter()
        .map(|c| if c.0[1..].iter().all(|&x| x == 0) { Ok(c.0[0]) } else { Err(Error::TraceNotRational(0)) })
        .collect()
}

/// Tab[e] = Tr(G^e) mod p^n for 0 <= e < len, in parallel chunks. Each
/// chunk seeds n values directly and then runs the linear recurrence
/// given by the characteristic polynomial of G.
fn trace_table(zq: &ZqCtx, gen: &ZqElt, len: u64, strategy: Strategy) -> Result<Vec<u64>> {
    let m = zq.m;
    let n = zq.n;
    let charpoly = teich_charpoly(zq, gen)?;
    let small = m.pe <= u32::MAX as u64;
    let neg: Vec<u64> = charpoly.iter().map(|&c| m.neg(c)).collect();
    let ranges = par::chunks(len, par::default_parts(strategy));
    let parts = par::map_collect(strategy, ranges.len(), |ci| {
        let r = ranges[ci].clone();
        let size = (r.end - r.start) as usize;
        let mut out = Vec::with_capacity(size);
        let mut cur = zq.pow(gen, r.start as u128);
        for _ in 0..size.min(n) {
            out.push(zq.trace(&cur).value());
            cur = zq.mul(&cur, gen);
        }
        for e in n..size {
            let w = &out[e - n..e];
            let mut acc = 0u128;
            for (x, c) in w.iter().zip(&neg) {
                acc += *x as u128 * *c as u128;
                if !small {
                    acc %= m.pe as u128;
                }
            }
            out.push((acc % m.pe as u128) as u64);
        }
        out
    });
    Ok(parts.concat())
}

/// Histogram of Tr(f̂(ω(x))) mod p^n_eff over x in F_{q^k}^×.
pub fn trace_histogram(
    spec: &TowerSpec,
    k: usize,
    n_eff: u32,
    budget: u64,
    strategy: Strategy,
) -> Result<TraceHistogram> {
    let p = spec.p;
    let size = (spec.q() as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if size > budget as u128 {
        return Err(Error::BudgetExceeded { size, budget });
    }
    let field = FieldCtx::for_extension(p, spec.a, k)?;
    let zq = ZqCtx::new(&field, n_eff)?;
    let pe = zq.m.pe;
    let order = size as u64 - 1;
    let g = field.primitive_element();
    let big_g = zq.teichmuller(&g);
    let q = spec.q();
    let terms: Vec<(u64, u64)> = spec
        .f
        .iter()
        .enumerate()
        .filter_map(|(i, b)| base_log(&field, &g, q, &field.embed(&b.0)).map(|beta| (i as u64, beta)))
        .collect();
    let tab = trace_table(&zq, &big_g, order, strategy)?;
    let zero_cell = match terms.first() {
        Some(&(0, beta)) => tab[beta as usize],
        _ => 0,
    };
    let ranges = par::chunks(order, par::default_parts(strategy));
    let counts = par::map_reduce(
        strategy,
        ranges,
        |r| {
            let mut local: HashMap<u64, u64> = HashMap::new();
            for e in r {
                let mut t = 0u64;
                for &(i, beta) in &terms {
                    let idx = (beta + (i * e) % order) % order;
                    t += tab[idx as usize];
                    if t >= pe {
                        t -= pe;
                    }
                }
                *local.entry(t).or_insert(0) += 1;
            }
            local
        },
        |mut a, b| {
            for (t, c) in b {
                *a.entry(t).or_insert(0) += c;
            }
            a
        },
    )
    .unwrap_or_default();
    Ok(TraceHistogram { p, k, n_eff, counts: counts.into_iter().collect(), zero_cell })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expsum::Precision;
    use crate::padic::teich_trace;

    fn spec(p: u64, f: &[u64]) -> TowerSpec {
        TowerSpec::over_fp(p, f, Precision::new(p, 4, 4, 2)).unwrap()
    }

    fn hist(s: &TowerSpec, k: usize, n: u32) -> TraceHistogram {
        trace_histogram(s, k, n, 1 << 20, Strategy::Sequential).unwrap()
    }

    #[test]
    fn small_examples() {
        let h = hist(&spec(2, &[1, 0]), 1, 2);
        assert_eq!(h.counts, BTreeMap::from([(1, 1)]));
        assert_eq!(h.zero_cell, 0);
        let h = hist(&spec(3, &[1, 0]), 1, 1);
        assert_eq!(h.counts, BTreeMap::from([(1, 1), (2, 1)]));
        let h = hist(&spec(2, &[1, 0, 0, 0]), 2, 2);
        assert_eq!(h.counts, BTreeMap::from([(2, 3)]));
    }

    /// Direct enumeration with the conjugate-sum trace.
    fn reference(s: &TowerSpec, k: usize, n: u32) -> TraceHistogram {
        let field = FieldCtx::for_extension(s.p, s.a, k).unwrap();
        let zq = ZqCtx::new(&field, n).unwrap();
        let coeffs: Vec<FqElt> = s.f.iter().map(|b| field.embed(&b.0)).collect();
        let mut counts = BTreeMap::new();
        let mut zero_cell = 0;
        for x in field.enumerate() {
            let t = teich_trace(&field, &zq, &x, &coeffs).unwrap().value();
            if field.is_zero(&x) {
                zero_cell = t;
            } else {
                *counts.entry(t).or_insert(0) += 1;
            }
        }
        TraceHistogram { p: s.p, k, n_eff: n, counts, zero_cell }
    }

    #[test]
    fn matches_conjugate_sum_enumeration() {
        let cases: Vec<(TowerSpec, usize)> = vec![
            (spec(2, &[1, 0, 1, 1]), 3),
            (spec(3, &[1, 2, 1]), 3),
            (spec(5, &[1, 0, 3]), 2),
            (spec(3, &[1, 1, 0, 2, 1]), 2),
        ];
        for (s, k) in cases {
            let fast = hist(&s, k, 5);
            assert_eq!(fast, reference(&s, k, 5));
            let par = trace_histogram(&s, k, 5, 1 << 20, Strategy::Parallel).unwrap();
            assert_eq!(fast, par);
        }
    }

    #[test]
    fn extension_base_field() {
        // a = 2: f = x^3 + w x + 1 over F_4, w the class of u
        let p = 2;
        let f = vec![FqElt(vec![1, 0]), FqElt(vec![0, 1]), FqElt(vec![0, 0]), FqElt(vec![1, 0])];
        let s = TowerSpec::new(p, 2, f, Precision::new(p, 4, 4, 2)).unwrap();
        for k in 1..=3 {
            let fast = hist(&s, k, 4);
            assert_eq!(fast.mass(), 4u64.pow(k as u32) - 1);
            assert_eq!(fast, reference(&s, k, 4));
        }
    }

    #[test]
    fn reduce_and_budget() {
        let s = spec(3, &[1, 0, 1]);
        let h = hist(&s, 2, 4);
        assert_eq!(h.reduce(2), hist(&s, 2, 2));
        assert!(matches!(
            trace_histogram(&s, 4, 2, 10, Strategy::Sequential),
            Err(Error::BudgetExceeded { size: 81, budget: 10 })
        ));
    }
}
