//! Slope factorization of C*(T, s) into degree-d components and the
//! weight-slope law on the boundary annulus.
//!
//! Component i collects the T-adic slopes in [i, i+1) (in T^{a(p-1)} units),
//! i.e. the segment x ∈ [id, (i+1)d] of the polygon; with this indexing the
//! law reads v(α) = a p^{m0-1} (p-1) (β_j + i) v_W starting from i = 0.

use std::collections::BTreeMap;

use num_rational::Rational64;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::expsum::{specialize_t, BivSeries, Tower};
use crate::newton::{lower_hull, rational_json, render_svg, NewtonPolygon, Normalization};
use crate::padic::{phi, Modulus, PadicInt, Valuation};
use crate::series::{Series, Var};
use crate::tower::l_slopes;

type TPoly = Vec<u64>;

fn tval(a: &[u64]) -> Option<usize> {
    a.iter().position(|&x| x != 0)
}

fn tmul(m: &Modulus, a: &[u64], b: &[u64], len: usize) -> TPoly {
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

fn tinv(m: &Modulus, a: &[u64], len: usize) -> Option<TPoly> {
    let i0 = m.inv(a[0])?;
    let mut out = vec![0u64; len];
    out[0] = i0;
    for k in 1..len {
        let mut acc = 0u64;
        for i in 1..=k.min(a.len() - 1) {
            acc = m.add(acc, m.mul(a[i], out[k - i]));
        }
        out[k] = m.neg(m.mul(i0, acc));
    }
    Some(out)
}

fn tsub_assign(m: &Modulus, a: &mut [u64], b: &[u64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x = m.sub(*x, *y);
    }
}

/// Product of series in an outer variable with T-polynomial coefficients.
fn smul(m: &Modulus, a: &[TPoly], b: &[TPoly], slen: usize, tlen: usize) -> Vec<TPoly> {
    let mut out = vec![vec![0u64; tlen]; slen];
    for (i, x) in a.iter().enumerate().take(slen) {
        if tval(x).is_none() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(slen - i) {
            let pr = tmul(m, x, y, tlen);
            for (o, z) in out[i + j].iter_mut().zip(&pr) {
                *o = m.add(*o, *z);
            }
        }
    }
    out
}

/// Inverse of a series whose constant term is a unit T-polynomial.
fn sinv(m: &Modulus, a: &[TPoly], slen: usize, tlen: usize) -> Option<Vec<TPoly>> {
    let i0 = tinv(m, &a[0], tlen)?;
    let mut out: Vec<TPoly> = vec![vec![0u64; tlen]; slen];
    out[0] = i0.clone();
    for k in 1..slen {
        let mut acc = vec![0u64; tlen];
        for i in 1..=k.min(a.len() - 1) {
            let pr = tmul(m, &a[i], &out[k - i], tlen);
            for (o, z) in acc.iter_mut().zip(&pr) {
                *o = m.add(*o, *z);
            }
        }
        out[k] = tmul(m, &i0, &acc, tlen).into_iter().map(|x| m.neg(x)).collect();
    }
    Some(out)
}

/// Multiply by T^shift (shift may be negative), keeping `len` terms.
fn tshift(a: &[u64], shift: i64, len: usize) -> TPoly {
    let mut out = vec![0u64; len];
    for (i, &x) in a.iter().enumerate() {
        let j = i as i64 + shift;
        if j >= 0 && (j as usize) < len {
            out[j as usize] = x;
        }
    }
    out
}

/// ceil(a(p-1) J(J-1) / 2d): the Hodge lower bound for v_T of the s^J coefficient.
fn hodge_t(e: i64, d: i64, j: i64) -> i64 {
    let num = e * j * (j - 1);
    let den = 2 * d;
    (num + den - 1).div_euclid(den)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentFactor {
    pub i: usize,
    /// b_{i,0..d} as T-series; b_{i,0} = 1.
    pub coeffs: Vec<Series<PadicInt>>,
    /// T-adic precision of the coefficients.
    pub t_prec: usize,
    pub leading_unit: bool,
}

impl ComponentFactor {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// T^{a(p-1)}-adic polygon of P_i.
    pub fn np_t_adic(&self, a: usize) -> Result<NewtonPolygon> {
        let p = self.coeffs[0].coeff(0).p();
        let scale = Rational64::new(1, a as i64 * (p as i64 - 1));
        let pts: Vec<(i64, Valuation)> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, b)| {
                let v = match b.valuation() {
                    Some(v) => Valuation::Exact(Rational64::from(v as i64)),
                    None => Valuation::AtLeast(Rational64::from(self.t_prec as i64)),
                };
                (j as i64, v.scale(scale))
            })
            .collect();
        lower_hull(&pts, Normalization::TAdic)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "component": self.i,
            "t_prec": self.t_prec,
            "leading_unit": self.leading_unit,
            "coeffs": self.coeffs.iter().map(|b| b.coeffs().iter().map(|c| c.signed()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct SlopeFactorization {
    pub factors: Vec<ComponentFactor>,
    /// C / Π P_i, a series whose T-adic slopes are all >= `factors.len()`.
    pub remainder: BivSeries,
}

fn to_raw(c: &BivSeries, m: &Modulus) -> Vec<TPoly> {
    c.coeffs().iter().map(|a| a.coeffs().iter().map(|x| x.value() % m.pe).collect()).collect()
}

fn from_raw(t: &[u64], p: u64, n: u32) -> Series<PadicInt> {
    Series::new(Var::T, t.iter().map(|&x| PadicInt::new(x, p, n)).collect())
}

/// A coefficient known mod T^prec (`v.len() == prec`).
type Approx = Vec<u64>;

fn vlb(x: &Approx) -> i64 {
    tval(x).unwrap_or(x.len()) as i64
}

fn ceil_rat(x: Rational64) -> i64 {
    x.ceil().to_integer()
}

/// The split of C at the vertex x = h = nd of its T-adic polygon.
struct Vertex {
    h: usize,
    sigma: i64,
    y: i64,
    /// A radius strictly between the last slope before h and σ.
    rho: Rational64,
    /// Gauss valuation at ρ of the total error (truncation plus discarded tail).
    err: Rational64,
}

fn locate_vertex(q: &[TPoly], q_prec: usize, e: i64, d: usize, n: usize) -> Result<Vertex> {
    let k_max = q.len() - 1;
    let h = n * d;
    let sigma = e * n as i64;
    let exact = |j: usize| tval(&q[j]).filter(|&v| v < q_prec).map(|v| v as i64);
    let bound = |j: usize| -> i64 {
        let hodge = hodge_t(e, d as i64, j as i64);
        if j <= k_max {
            exact(j).unwrap_or(hodge.max(q_prec as i64))
        } else {
            hodge
        }
    };
    let y = exact(h).ok_or(Error::InsufficientPrecision(h))?;
    let mut lam = Rational64::from(i64::MIN / 4);
    let mut lam_exact = true;
    for j in 0..h {
        let s = Rational64::new(y - bound(j), (h - j) as i64);
        if s > lam {
            lam = s;
            lam_exact = exact(j).is_some();
        }
    }
    if lam >= Rational64::from(sigma) {
        return Err(if lam_exact { Error::NoGapAtVertex(h) } else { Error::InsufficientPrecision(h) });
    }
    let rho = (lam + Rational64::from(sigma)) / 2;
    let top = Rational64::from(y) - rho * h as i64;
    for j in h + 1..=k_max {
        if let Some(v) = exact(j) {
            if v < y + (j - h) as i64 * sigma {
                return Err(Error::NoGapAtVertex(h));
            }
        } else if Rational64::from(bound(j)) - rho * j as i64 <= top {
            return Err(Error::InsufficientPrecision(h));
        }
    }
    // tail past the truncation, bounded below by the Hodge polygon
    let mut err = Rational64::from(i64::MAX / 4);
    let tail_end = (k_max + 2).max(ceil_rat(rho * 2 * d as i64 / e) as usize + 4);
    for j in 0..=tail_end {
        let b = if j <= k_max { hodge_t(e, d as i64, j as i64).max(q_prec as i64) } else { bound(j) };
        let g = Rational64::from(b) - rho * j as i64;
        if j > k_max && g <= top {
            return Err(Error::InsufficientPrecision(h));
        }
        err = err.min(g);
    }
    if err <= top {
        return Err(Error::InsufficientPrecision(h));
    }
    Ok(Vertex { h, sigma, y, rho, err })
}

/// Factor t^h-distinguished polynomial `c` (t-coefficients as T-polynomials of
/// length tp, c ≡ t^h B mod T with B(0) a unit) as W V, W monic of degree h.
/// Returns the coefficients w_0..w_{h-1}.
#[allow(clippy::needless_range_loop)]
fn hensel_split(m: &Modulus, c: &[TPoly], h: usize, tp: usize) -> Option<Vec<TPoly>> {
    let deg = c.len() - 1;
    let coeff = |r: usize| -> Vec<u64> { c.iter().map(|x| x[r]).collect() };
    let b0: Vec<u64> = coeff(0)[h..].to_vec();
    let b_inv = tinv(m, &b0, h.max(1))?;
    let mut ws: Vec<Vec<u64>> = vec![{
        let mut w = vec![0u64; h + 1];
        w[h] = 1;
        w
    }];
    let mut vs: Vec<Vec<u64>> = vec![b0];
    for r in 1..tp {
        let mut rhs = coeff(r);
        for i in 0..=r {
            let j = r - i;
            if i == r || j == r {
                continue;
            }
            for (a, &x) in ws[i].iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (b, &y) in vs[j].iter().enumerate() {
                    rhs[a + b] = m.sub(rhs[a + b], m.mul(x, y));
                }
            }
        }
        let mut w = tmul(m, &rhs[..h.min(rhs.len())], &b_inv, h);
        w.push(0);
        let bw = tmul(m, &vs[0], &w, deg + 1);
        let v: Vec<u64> = (h..=deg).map(|k| m.sub(rhs[k], bw[k])).collect();
        if (0..h).any(|k| rhs[k] != bw[k]) {
            return None;
        }
        ws.push(w);
        vs.push(v);
    }
    Some((0..h).map(|k| ws.iter().map(|w| w[k]).collect()).collect())
}

/// Â_n = A_n / (unit part of its s^h coefficient): the factor of C carrying
/// the first h = nd slopes, scaled so that its top coefficient is exactly
/// T^Y. Coefficient k is returned mod T^{P_k} with P_k certified from the
/// Gauss norm of the error at the circle ρ.
#[allow(clippy::needless_range_loop)]
fn top_normalized_factor(m: &Modulus, q: &[TPoly], vx: &Vertex) -> Result<Vec<Approx>> {
    let h = vx.h;
    let shift_m = h as i64 * vx.sigma - vx.y;
    let tp = (shift_m + ceil_rat(vx.err)).max(1) as usize;
    let sheared: Vec<TPoly> = q.iter().enumerate().map(|(j, x)| tshift(x, shift_m - j as i64 * vx.sigma, tp)).collect();
    let w = hensel_split(m, &sheared, h, tp).ok_or(Error::NoGapAtVertex(h))?;
    let mut out = Vec::with_capacity(h + 1);
    for k in 0..=h {
        let prec = ceil_rat(vx.err + vx.rho * k as i64).max(0) as usize;
        let s = k as i64 * vx.sigma - shift_m;
        if k == h {
            out.push(tshift(&[1], vx.y, prec));
            continue;
        }
        if s < 0 && w[k].iter().take((-s) as usize).any(|&x| x != 0) && prec > 0 {
            return Err(Error::Verification(format!("coefficient {k} of the split at x = {h} is not T-integral")));
        }
        out.push(tshift(&w[k], s, prec));
    }
    Ok(out)
}

fn approx_mul(m: &Modulus, a: &Approx, b: &Approx) -> Approx {
    let prec = (a.len() as i64 + vlb(b)).min(b.len() as i64 + vlb(a)) as usize;
    tmul(m, a, b, prec)
}

/// Exact quotient of top-normalized factors, by long division from the top.
fn divide_from_top(m: &Modulus, num: &[Approx], den: &[Approx], y_den: usize) -> Result<Vec<Approx>> {
    let h = den.len() - 1;
    let deg = num.len() - 1 - h;
    let mut q: Vec<Approx> = vec![Vec::new(); deg + 1];
    for j in (0..=deg).rev() {
        let mut acc = num[h + j].clone();
        for l in j + 1..=deg {
            if h + j < l {
                continue;
            }
            let pr = approx_mul(m, &q[l], &den[h + j - l]);
            acc.truncate(pr.len().min(acc.len()));
            tsub_assign(m, &mut acc, &pr);
        }
        if acc.iter().take(y_den).any(|&x| x != 0) {
            return Err(Error::Verification("nested slope factors do not divide".into()));
        }
        q[j] = acc.get(y_den..).map(|x| x.to_vec()).unwrap_or_default();
    }
    Ok(q)
}

/// Factor C*(T, s) mod (p^N, T^D, s^{K+1}) as P_0 ⋯ P_{upto-1} · remainder.
///
/// For each n the factor Â_n carrying the slopes below n is split off by
/// Hensel lifting after the shear s = t / T^{a(p-1)n}. Its error is bounded
/// through the Gauss norm on a circle between the blocks, relative to C's
/// norm there; the discarded tail s^{>K} is bounded by the Hodge polygon.
/// P_i = Â_{i+1} / Â_i is then obtained by division from the top, tracking
/// the precision of every coefficient.
pub fn slope_factor(c: &BivSeries, p: u64, a: usize, d: usize, upto: usize) -> Result<SlopeFactorization> {
    let k_max = c.order() - 1;
    if k_max < d * upto {
        return Err(Error::InsufficientPrecision(d * upto));
    }
    let n = c.coeffs().iter().flat_map(|s| s.coeffs()).map(|x| x.prec()).min().unwrap_or(0);
    let m = Modulus::new(p, n)?;
    let e = (a as i64) * (p as i64 - 1);
    let q = to_raw(c, &m);
    let q_prec = c.coeff(0).order();
    let mut prev: Vec<Approx> = vec![vec![1]];
    let mut prev_y = 0usize;
    let mut factors = Vec::with_capacity(upto);
    for i in 0..upto {
        let vx = locate_vertex(&q, q_prec, e, d, i + 1)?;
        if q[vx.h][vx.y as usize].is_multiple_of(p) {
            return Err(Error::NoGapAtVertex(vx.h));
        }
        let top = top_normalized_factor(&m, &q, &vx)?;
        let g = if i == 0 { top.clone() } else { divide_from_top(&m, &top, &prev, prev_y)? };
        let g0 = &g[0];
        if g0.is_empty() || g0[0] % p == 0 {
            return Err(Error::InsufficientPrecision(vx.h));
        }
        let g0_inv = tinv(&m, g0, g0.len()).expect("unit");
        let b: Vec<Approx> = g.iter().map(|x| approx_mul(&m, x, &g0_inv)).collect();
        let t_prec = b[1..].iter().map(|x| x.len()).min().unwrap_or(0);
        if t_prec == 0 {
            return Err(Error::InsufficientPrecision(vx.h));
        }
        let mut coeffs: Vec<TPoly> = b.iter().map(|x| tshift(x, 0, t_prec)).collect();
        coeffs[0] = tshift(&[1], 0, t_prec);
        let leading_unit = tval(&coeffs[d]).is_some_and(|v| !coeffs[d][v].is_multiple_of(p));
        factors.push(ComponentFactor {
            i,
            coeffs: coeffs.iter().map(|b| from_raw(b, p, n)).collect(),
            t_prec,
            leading_unit,
        });
        prev = top;
        prev_y = vx.y as usize;
    }
    // remainder = C / Π P_i
    let tp = factors.iter().map(|f| f.t_prec).min().unwrap_or(q_prec).min(q_prec);
    let cut = |v: &[TPoly]| -> Vec<TPoly> { v.iter().map(|x| tshift(x, 0, tp)).collect() };
    let mut prod: Vec<TPoly> = vec![tshift(&[1], 0, tp)];
    for f in &factors {
        prod = smul(&m, &prod, &cut(&to_raw_t(&f.coeffs, &m)), k_max + 1, tp);
    }
    let inv = sinv(&m, &prod, k_max + 1, tp).expect("constant term 1");
    let rem = smul(&m, &cut(&q), &inv, k_max + 1, tp);
    let remainder = Series::new(Var::S, rem.iter().map(|x| from_raw(x, p, n)).collect());
    let fact = SlopeFactorization { factors, remainder };
    fact.check_product(c)?;
    Ok(fact)
}

fn to_raw_t(coeffs: &[Series<PadicInt>], m: &Modulus) -> Vec<TPoly> {
    coeffs.iter().map(|b| b.coeffs().iter().map(|x| x.value() % m.pe).collect()).collect()
}

impl SlopeFactorization {
    pub fn t_prec(&self) -> usize {
        self.factors.iter().map(|f| f.t_prec).min().unwrap_or_else(|| self.remainder.coeff(0).order())
    }

    /// Π P_i · remainder ≡ C mod (p^N, T^prec, s^{K+1}).
    pub fn check_product(&self, c: &BivSeries) -> Result<()> {
        let p = c.coeff(0).coeff(0).p();
        let n = c.coeff(0).coeff(0).prec();
        let m = Modulus::new(p, n)?;
        let tp = self.t_prec();
        let slen = c.order();
        let cut = |v: Vec<TPoly>| -> Vec<TPoly> { v.into_iter().map(|x| tshift(&x, 0, tp)).collect() };
        let mut acc = cut(to_raw(&self.remainder, &m));
        for f in &self.factors {
            acc = smul(&m, &acc, &cut(to_raw_t(&f.coeffs, &m)), slen, tp);
        }
        if acc != cut(to_raw(c, &m)) {
            return Err(Error::Verification("product of components does not reproduce C*(T, s)".into()));
        }
        Ok(())
    }
}

/// β_1 = 0 < ... < β_l with multiplicities, and the constant a p^{m0-1} (p-1).
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFamily {
    pub betas: Vec<(Rational64, usize)>,
    pub constant: i64,
    pub m0: u32,
}

impl SlopeFamily {
    pub fn to_json(&self) -> Value {
        json!({
            "betas": self.betas.iter().map(|(b, k)| json!({"beta": rational_json(b), "multiplicity": k})).collect::<Vec<_>>(),
            "constant": self.constant,
            "m0": self.m0,
        })
    }
}

/// Distinct values among {0, α_1, ..} from L(χ_0, s) at conductor p^{m0}.
pub fn component_slopes(tower: &Tower, margin: usize) -> Result<SlopeFamily> {
    let spec = &tower.spec;
    let m0 = spec.m0();
    let (_, alphas) = l_slopes(tower, m0, margin)?;
    Ok(family_from_alphas(&alphas, spec.p, spec.a, m0))
}

pub fn family_from_alphas(alphas: &[Rational64], p: u64, a: usize, m0: u32) -> SlopeFamily {
    let mut tally: BTreeMap<Rational64, usize> = BTreeMap::new();
    *tally.entry(Rational64::zero()).or_default() += 1;
    for x in alphas {
        *tally.entry(*x).or_default() += 1;
    }
    SlopeFamily { betas: tally.into_iter().collect(), constant: a as i64 * p.pow(m0 - 1) as i64 * (p as i64 - 1), m0 }
}

/// v_p(π_χ) for a character of conductor p^m.
pub fn weight_valuation(p: u64, m: u32) -> Rational64 {
    Rational64::new(1, ((p - 1) * p.pow(m - 1)) as i64)
}

/// Whether |π_χ| >= r = p^{-8d / (a(p-1)(d-1)^2)}.
pub fn in_annulus(p: u64, a: usize, d: usize, m: u32) -> bool {
    if d <= 1 {
        return true;
    }
    let bound = Rational64::new(8 * d as i64, a as i64 * (p as i64 - 1) * (d as i64 - 1).pow(2));
    weight_valuation(p, m) <= bound
}

#[derive(Debug, Clone, PartialEq)]
pub struct LawCheck {
    pub component: usize,
    pub conductor: u32,
    /// p-adic valuations of the reciprocal roots of P_i|_{T = π_χ}.
    pub slopes: Vec<Rational64>,
    pub predicted: Vec<Rational64>,
    pub pass: bool,
}

impl LawCheck {
    pub fn to_json(&self) -> Value {
        json!({
            "component": self.component,
            "conductor": self.conductor,
            "slopes": self.slopes.iter().map(rational_json).collect::<Vec<_>>(),
            "predicted": self.predicted.iter().map(rational_json).collect::<Vec<_>>(),
            "verdict": if self.pass { "match" } else { "mismatch" },
        })
    }
}

/// π_χ-adic polygon of P_i|_{T = π_χ}, with values at or beyond the
/// truncation min(T-precision, φ N) read as lower bounds.
pub fn specialized_polygon(f: &ComponentFactor, m: u32) -> Result<NewtonPolygon> {
    let p = f.coeffs[0].coeff(0).p();
    let n = f.coeffs[0].coeff(0).prec();
    let cap = Rational64::from((f.t_prec as i64).min(phi(p, m) as i64 * n as i64));
    let pts: Vec<(i64, Valuation)> = f
        .coeffs
        .iter()
        .enumerate()
        .map(|(j, b)| {
            let v = match specialize_t(b, m).valuation() {
                Valuation::Exact(v) if v < cap => Valuation::Exact(v),
                _ => Valuation::AtLeast(cap),
            };
            (j as i64, v)
        })
        .collect();
    lower_hull(&pts, Normalization::PiChi)
}

/// Predicted p-adic slopes of component i at conductor p^m: the i-th block of
/// d values in the sorted union over i' of {constant (β_j + i') v_W}.
pub fn predicted_component(family: &SlopeFamily, d: usize, i: usize, p: u64, m: u32) -> Vec<Rational64> {
    let vw = weight_valuation(p, m);
    let per = family.betas.iter().map(|(_, k)| k).sum::<usize>();
    let reps = (i + 1) * d / per + 2;
    let mut all = Vec::new();
    for ip in 0..reps {
        for (b, k) in &family.betas {
            for _ in 0..*k {
                all.push(Rational64::from(family.constant) * (b + ip as i64) * vw);
            }
        }
    }
    all.sort();
    all[i * d..(i + 1) * d].to_vec()
}

/// Check the weight-slope law at every (m, i); weights outside the boundary
/// annulus and conductors below p^{m0} are refused.
pub fn verify_weight_slope_law(
    fact: &SlopeFactorization,
    family: &SlopeFamily,
    p: u64,
    a: usize,
    conductors: &[u32],
) -> Result<Vec<LawCheck>> {
    let d = fact.factors.first().map(|f| f.degree()).unwrap_or(0);
    let mut out = Vec::new();
    for &m in conductors {
        if m < family.m0 || m == 0 {
            return Err(Error::InvalidSpec(format!("conductor exponent {m} is below m0 = {}", family.m0)));
        }
        if !in_annulus(p, a, d, m) {
            return Err(Error::WeightOutsideAnnulus(m));
        }
        let to_p = Rational64::new(1, phi(p, m) as i64);
        for f in &fact.factors {
            let slopes: Vec<Rational64> = specialized_polygon(f, m)?.slopes().into_iter().map(|s| s * to_p).collect();
            let predicted = predicted_component(family, d, f.i, p, m);
            let pass = slopes == predicted;
            out.push(LawCheck { component: f.i, conductor: m, slopes, predicted, pass });
        }
    }
    Ok(out)
}

/// Consecutive components never interleave at any tested conductor.
pub fn components_disjoint(checks: &[LawCheck]) -> bool {
    let mut by_m: BTreeMap<u32, Vec<&LawCheck>> = BTreeMap::new();
    for c in checks {
        by_m.entry(c.conductor).or_default().push(c);
    }
    by_m.values().all(|cs| {
        let mut cs = cs.clone();
        cs.sort_by_key(|c| c.component);
        cs.windows(2).all(|w| match (w[0].slopes.last(), w[1].slopes.first()) {
            (Some(hi), Some(lo)) => hi < lo,
            _ => true,
        })
    })
}

/// Informational: the smallest r such that slope[k + r] - slope[k] is the
/// same for every k, together with that difference.
#[derive(Debug, Clone, PartialEq)]
pub struct ApProbe {
    pub period: Option<usize>,
    pub increment: Option<Rational64>,
}

pub fn ap_probe(slopes: &[Rational64]) -> ApProbe {
    for r in 1..=slopes.len() / 2 {
        let diffs: Vec<Rational64> = (0..slopes.len() - r).map(|k| slopes[k + r] - slopes[k]).collect();
        if diffs.windows(2).all(|w| w[0] == w[1]) {
            return ApProbe { period: Some(r), increment: diffs.first().copied() };
        }
    }
    ApProbe { period: None, increment: None }
}

/// One SVG per conductor, overlaying the specialized component polygons.
pub fn render_components_svg(fact: &SlopeFactorization, m: u32) -> Result<String> {
    const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
    let polys: Vec<(String, NewtonPolygon)> =
        fact.factors.iter().map(|f| Ok((format!("P_{}", f.i), specialized_polygon(f, m)?))).collect::<Result<_>>()?;
    let layers: Vec<(&str, &NewtonPolygon, &str)> =
        polys.iter().enumerate().map(|(k, (l, np))| (l.as_str(), np, COLORS[k % COLORS.len()])).collect();
    Ok(render_svg(&format!("components at conductor p^{m}"), &layers))
}
