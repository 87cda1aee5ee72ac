//! Dwork-matrix pathway for a = 1: C*(T, s) = det(I - M s), with M the
//! matrix of ψ_p ∘ E_f on the basis π^{i/d} x^i.
//!
//! Everything is computed in w = π^{1/d} with coefficients mod p^(N + v_p(K!)).
//! Entries in row j carry w^{(p-1)j}, so products and traces only visit
//! index chains whose total weight stays below the w-truncation W.

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::expsum::{BivSeries, TowerSpec};
use crate::newton::{exact_prefix, lower_hull, NewtonPolygon, Normalization};
use crate::nt;
use crate::padic::{Modulus, PadicInt, Valuation};
use crate::par::{self, Strategy};
use crate::series::{exp_from_power_sums, guard_digits, reversion, Ring, Series, Var};

/// Multiply two truncated series mod p^e.
fn mul_trunc(m: &Modulus, a: &[u64], b: &[u64], len: usize) -> Vec<u64> {
    let mut out = vec![0u64; len];
    for (i, &x) in a.iter().enumerate().take(len) {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(len - i) {
            out[i + j] = m.add(out[i + j], m.mul(x, y));
        }
    }
    out
}

fn pow_trunc(m: &Modulus, a: &[u64], mut e: u64, len: usize) -> Vec<u64> {
    let mut r = vec![0u64; len];
    r[0] = 1 % m.pe;
    let mut b = a[..len.min(a.len())].to_vec();
    b.resize(len, 0);
    while e > 0 {
        if e & 1 == 1 {
            r = mul_trunc(m, &r, &b, len);
        }
        e >>= 1;
        if e > 0 {
            b = mul_trunc(m, &b, &b, len);
        }
    }
    r
}

/// g with g^i = h and g(0) = 1, for h(0) = 1 and p ∤ i; only divides by i.
fn unit_root(m: &Modulus, h: &[u64], i: u64) -> Vec<u64> {
    let len = h.len();
    let inv_i = m.inv(i % m.pe).expect("p does not divide i");
    let mut g = vec![0u64; len];
    g[0] = 1 % m.pe;
    for n in 1..len {
        let c = pow_trunc(m, &g, i, n + 1)[n];
        g[n] = m.mul(m.sub(h[n], c), inv_i);
    }
    g
}

fn series_inverse(m: &Modulus, h: &[u64]) -> Vec<u64> {
    let len = h.len();
    let inv0 = m.inv(h[0]).expect("unit constant term");
    let mut g = vec![0u64; len];
    g[0] = inv0;
    for k in 1..len {
        let mut acc = 0;
        for i in 1..=k {
            acc = m.add(acc, m.mul(h[i], g[k - i]));
        }
        g[k] = m.neg(m.mul(acc, inv0));
    }
    g
}

/// Artin-Hasse series mod (p^e, π^order) from Π_{p∤i} (1 - π^i)^{-μ(i)/i}.
pub fn artin_hasse_raw(m: &Modulus, order: usize) -> Vec<u64> {
    let p = m.p;
    let mut acc = vec![0u64; order];
    acc[0] = 1 % m.pe;
    for i in 1..order as u64 {
        let mu = nt::mobius(i);
        if i % p == 0 || mu == 0 {
            continue;
        }
        // (1 - y)^{1/i} in y = π^i
        let len = (order - 1) / i as usize + 1;
        let mut h = vec![0u64; len];
        h[0] = 1 % m.pe;
        if len > 1 {
            h[1] = m.neg(1 % m.pe);
        }
        let mut g = unit_root(m, &h, i);
        if mu == 1 {
            g = series_inverse(m, &g);
        }
        let mut spread = vec![0u64; order];
        for (n, c) in g.into_iter().enumerate() {
            spread[n * i as usize] = c;
        }
        acc = mul_trunc(m, &acc, &spread, order);
    }
    acc
}

pub fn artin_hasse(p: u64, n: u32, order: usize) -> Result<Series<PadicInt>> {
    let m = Modulus::new(p, n)?;
    Ok(Series::new(Var::Pi, artin_hasse_raw(&m, order).into_iter().map(|c| PadicInt::new(c, p, n)).collect()))
}

/// π(T) with E(π(T)) = 1 + T.
pub fn pi_of_t(p: u64, n: u32, order: usize) -> Result<Series<PadicInt>> {
    let mut e = artin_hasse(p, n, order)?;
    e.set_coeff(0, PadicInt::new(0, p, n));
    let mut g = reversion(&e)?;
    g.var = Var::T;
    Ok(g)
}

/// Teichmüller lift of an element of F_p.
fn teich_fp(m: &Modulus, b: u64) -> u64 {
    let mut z = b % m.p;
    for _ in 0..m.e {
        z = m.pow(z, m.p as u128);
    }
    z
}

/// Truncation data for the matrix pathway.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DworkParams {
    /// w-truncation: coefficients are known mod w^w_order.
    pub w_order: usize,
    /// Matrix rank.
    pub rank: usize,
    /// Working p-adic digits.
    pub digits: u32,
}

impl DworkParams {
    pub fn for_spec(spec: &TowerSpec) -> Self {
        let p = spec.p as usize;
        let w_order = spec.d() * spec.prec.d;
        let rank = spec.prec.k + w_order.div_ceil(p - 1);
        DworkParams { w_order, rank, digits: spec.prec.n + guard_digits(spec.p, spec.prec.k) }
    }
}

/// u_l as w-series (E_f = Σ u_l π^{l/d} x^l), for l <= max_l.
pub fn ef_coefficients(spec: &TowerSpec, params: &DworkParams, max_l: usize) -> Result<Vec<Vec<u64>>> {
    if spec.a != 1 {
        return Err(Error::UnsupportedA(spec.a as u32));
    }
    let d = spec.d();
    let p = spec.p;
    let m = Modulus::new(p, params.digits)?;
    let w_order = params.w_order;
    let pi_order = (w_order + max_l) / d + 1;
    let e = artin_hasse_raw(&m, pi_order);
    // bivariate E_f[x][π]
    let mut ef = vec![vec![0u64; pi_order]; max_l + 1];
    ef[0][0] = 1 % m.pe;
    for (i, b) in spec.f.iter().enumerate() {
        let bh = teich_fp(&m, b.0[0]);
        if bh == 0 {
            continue;
        }
        // E(b̂ π x^i) = Σ_n e_n b̂^n π^n x^{in}
        let mut factor: Vec<(usize, usize, u64)> = Vec::new();
        let mut bn = 1 % m.pe;
        for (n, &en) in e.iter().enumerate() {
            if i * n > max_l {
                break;
            }
            let c = m.mul(en, bn);
            if c != 0 {
                factor.push((i * n, n, c));
            }
            bn = m.mul(bn, bh);
        }
        let mut next = vec![vec![0u64; pi_order]; max_l + 1];
        for (xl, row) in ef.iter().enumerate() {
            for (pn, &v) in row.iter().enumerate() {
                if v == 0 {
                    continue;
                }
                for &(fx, fp, c) in &factor {
                    if xl + fx > max_l || pn + fp >= pi_order {
                        continue;
                    }
                    let cell = &mut next[xl + fx][pn + fp];
                    *cell = m.add(*cell, m.mul(v, c));
                }
            }
        }
        ef = next;
    }
    let mut out = Vec::with_capacity(max_l + 1);
    for (l, row) in ef.iter().enumerate() {
        let mut u = vec![0u64; w_order];
        for (n, &c) in row.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if d * n < l {
                return Err(Error::Verification(format!("E_f coefficient {l} is not divisible by π^({l}/d)")));
            }
            let e = d * n - l;
            if e < w_order {
                u[e] = c;
            }
        }
        out.push(u);
    }
    Ok(out)
}

/// Nuclear matrix M[j][i] = u_{pj-i} w^{(p-1)j}, truncated to w^W.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DworkMatrix {
    pub m: Modulus,
    pub params: DworkParams,
    /// entries[j][i] is a w-series of length W.
    pub entries: Vec<Vec<Vec<u64>>>,
}

pub fn dwork_matrix(spec: &TowerSpec, params: DworkParams) -> Result<DworkMatrix> {
    let p = spec.p as usize;
    let r = params.rank;
    let w = params.w_order;
    let u = ef_coefficients(spec, &params, p * r.saturating_sub(1))?;
    let m = Modulus::new(spec.p, params.digits)?;
    let mut entries = vec![vec![vec![0u64; w]; r]; r];
    for (j, row) in entries.iter_mut().enumerate() {
        let shift = (p - 1) * j;
        if shift >= w {
            continue;
        }
        for (i, cell) in row.iter_mut().enumerate() {
            if p * j < i {
                continue;
            }
            let ul = &u[p * j - i];
            cell[shift..w].copy_from_slice(&ul[..w - shift]);
        }
    }
    Ok(DworkMatrix { m, params, entries })
}

fn first_nonzero(v: &[u64]) -> usize {
    v.iter().position(|&c| c != 0).unwrap_or(v.len())
}

type Mat = Vec<Vec<Vec<u64>>>;

/// Accumulate a·b into out (all truncated at out.len()), skipping leading zeros.
#[inline]
fn mul_acc(m: &Modulus, out: &mut [u64], a: &[u64], va: usize, b: &[u64], vb: usize) {
    let w = out.len();
    for x in va..w.saturating_sub(vb) {
        let ax = a[x];
        if ax == 0 {
            continue;
        }
        for y in vb..w - x {
            out[x + y] = m.add(out[x + y], m.mul(ax, b[y]));
        }
    }
}

fn valuations(a: &Mat) -> Vec<Vec<usize>> {
    a.iter().map(|row| row.iter().map(|e| first_nonzero(e)).collect()).collect()
}

fn mat_mul(m: &Modulus, a: &Mat, b: &Mat, strategy: Strategy) -> Mat {
    let r = a.len();
    let w = a[0][0].len();
    let (va, vb) = (valuations(a), valuations(b));
    par::map_collect(strategy, r, |j| {
        let mut row = vec![vec![0u64; w]; r];
        for l in 0..r {
            if va[j][l] >= w {
                continue;
            }
            for i in 0..r {
                if va[j][l] + vb[l][i] >= w {
                    continue;
                }
                mul_acc(m, &mut row[i], &a[j][l], va[j][l], &b[l][i], vb[l][i]);
            }
        }
        row
    })
}

/// Tr(A B) truncated at w^W.
fn trace_of_product(m: &Modulus, a: &Mat, b: &Mat, strategy: Strategy) -> Vec<u64> {
    let r = a.len();
    let w = a[0][0].len();
    let (va, vb) = (valuations(a), valuations(b));
    let ranges = par::chunks(r as u64, par::default_parts(strategy));
    par::map_reduce(
        strategy,
        ranges,
        |rg| {
            let mut acc = vec![0u64; w];
            for j in rg.start as usize..rg.end as usize {
                for l in 0..r {
                    if va[j][l] + vb[l][j] < w {
                        mul_acc(m, &mut acc, &a[j][l], va[j][l], &b[l][j], vb[l][j]);
                    }
                }
            }
            acc
        },
        |x, y| x.iter().zip(&y).map(|(&s, &t)| m.add(s, t)).collect(),
    )
    .unwrap_or_else(|| vec![0; w])
}

/// Tr(M^k) for k = 1..=K, from powers up to ceil(K/2).
pub fn power_traces(mat: &DworkMatrix, k_max: usize, strategy: Strategy) -> Vec<Vec<u64>> {
    let m = &mat.m;
    let w = mat.params.w_order;
    let r = mat.params.rank;
    let mut powers: Vec<Mat> = vec![mat.entries.clone()];
    let half = k_max.div_ceil(2).max(1);
    while powers.len() < half {
        let next = mat_mul(m, powers.last().unwrap(), &mat.entries, strategy);
        powers.push(next);
    }
    let mut out = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        if k == 1 {
            let mut acc = vec![0u64; w];
            for j in 0..r {
                for (x, &c) in mat.entries[j][j].iter().enumerate() {
                    acc[x] = m.add(acc[x], c);
                }
            }
            out.push(acc);
        } else {
            let (a, b) = (k.div_ceil(2), k / 2);
            out.push(trace_of_product(m, &powers[a - 1], &powers[b - 1], strategy));
        }
    }
    out
}

/// Characteristic series det(I - M s) in w and after substituting π = π(T).
#[derive(Debug, Clone, PartialEq)]
pub struct DworkSeries {
    /// Coefficients a_k(w) mod p^N.
    pub w_form: Vec<Series<PadicInt>>,
    /// a_k(T) mod (p^N, T^D).
    pub t_form: BivSeries,
    pub params: DworkParams,
}

pub fn char_series(spec: &TowerSpec, strategy: Strategy) -> Result<DworkSeries> {
    char_series_with(spec, DworkParams::for_spec(spec), strategy)
}

pub fn char_series_with(spec: &TowerSpec, params: DworkParams, strategy: Strategy) -> Result<DworkSeries> {
    if spec.a != 1 {
        return Err(Error::UnsupportedA(spec.a as u32));
    }
    let p = spec.p;
    let d = spec.d();
    let n = spec.prec.n;
    let t_order = spec.prec.d;
    let k_max = spec.prec.k;
    let mat = dwork_matrix(spec, params)?;
    let traces = power_traces(&mat, k_max, strategy);
    let m = mat.m;
    let cs: Vec<Series<PadicInt>> = traces
        .into_iter()
        .map(|t| Series::new(Var::W, t.into_iter().map(|c| PadicInt::new(m.neg(c), p, m.e)).collect()))
        .collect();
    let w_form: Vec<Series<PadicInt>> = if cs.is_empty() {
        vec![Series::constant(Var::W, PadicInt::new(1, p, n), params.w_order)]
    } else {
        exp_from_power_sums(&cs, Var::S)?.into_coeffs().into_iter().map(|s| s.reduce_prec_all(n)).collect()
    };
    let pi_t = pi_of_t(p, n, t_order)?;
    let mut t_coeffs = Vec::with_capacity(w_form.len());
    for (k, a) in w_form.iter().enumerate() {
        if let Some(e) = (0..a.order()).find(|&e| e % d != 0 && !a.coeff(e).is_zero()) {
            return Err(Error::Verification(format!("a_{k} has a nonzero w^{e} term with d ∤ {e}")));
        }
        let in_pi: Vec<PadicInt> = (0..t_order).map(|i| *a.coeff(i * d)).collect();
        let b = Series::new(Var::T, in_pi).compose(&pi_t)?;
        t_coeffs.push(b);
    }
    Ok(DworkSeries { w_form, t_form: Series::new(Var::S, t_coeffs), params })
}

/// T^{p-1}-adic polygon from w-valuations: point k at v_w(a_k) / (d(p-1)).
pub fn np_t_adic(series: &DworkSeries, d: usize, p: u64) -> Result<NewtonPolygon> {
    let scale = Rational64::new(1, d as i64 * (p as i64 - 1));
    let pts: Vec<(i64, Valuation)> = series
        .w_form
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let v = match a.valuation() {
                Some(i) => Valuation::Exact(Rational64::from(i as i64)),
                None => Valuation::AtLeast(Rational64::from(a.order() as i64)),
            };
            (k as i64, v.scale(scale))
        })
        .collect();
    lower_hull(&exact_prefix(&pts), Normalization::TAdic)
}
