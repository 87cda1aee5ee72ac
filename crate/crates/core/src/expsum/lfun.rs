//! Exponential sums, L-functions and characteristic series built from
//! trace histograms.

use num_bigint::BigInt;
use num_rational::Rational64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::newton::{bigint_json, exact_prefix, lower_hull, NewtonPolygon, Normalization};
use crate::padic::{
    binom_falling_raw, binom_guard, binom_pow_raw, phi, Cyc, CycInt, CycMod, FactorialTable, Modulus, PadicInt,
    Valuation,
};
use crate::par::{chunks, default_parts, map_reduce, Strategy};
use crate::series::{exp_from_power_sums, guard_digits, Ring, Series, Var};

use super::{Tower, TraceHistogram};

/// Power series in s whose coefficients are T-series.
pub type BivSeries = Series<Series<PadicInt>>;

/// Which curve the sum runs over: the affine line, or G_m (x = 0 removed).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Over {
    A1,
    Gm,
}

/// Σ_t counts[t] (1+T)^t over a histogram, as integer vectors mod p^E.
fn binom_sum(m: &Modulus, hist: &TraceHistogram, order: usize, strategy: Strategy) -> Vec<u64> {
    let max_t = hist.counts.keys().next_back().copied().unwrap_or(0);
    let walk_cost = max_t as u128 * order as u128;
    let falling_cost = hist.counts.len() as u128 * 4 * order as u128;
    let accumulate = |acc: &mut [u64], pow: &[u64], c: u64| {
        let c = c % m.pe;
        for (a, x) in acc.iter_mut().zip(pow) {
            *a = m.add(*a, m.mul(*x, c));
        }
    };
    if walk_cost <= falling_cost {
        let mut acc = vec![0u64; order];
        let mut pow = binom_pow_raw(m, 0, order);
        let mut cur = 0u64;
        for (&t, &c) in &hist.counts {
            while cur < t {
                for i in (1..order).rev() {
                    pow[i] = m.add(pow[i], pow[i - 1]);
                }
                cur += 1;
            }
            accumulate(&mut acc, &pow, c);
        }
        return acc;
    }
    let fact = FactorialTable::new(m, order);
    let cells: Vec<(u64, u64)> = hist.counts.iter().map(|(&t, &c)| (t, c)).collect();
    let parts = default_parts(strategy);
    map_reduce(
        strategy,
        chunks(cells.len() as u64, parts),
        |r| {
            let mut acc = vec![0u64; order];
            for &(t, c) in &cells[r.start as usize..r.end as usize] {
                accumulate(&mut acc, &binom_falling_raw(m, &fact, t, order), c);
            }
            acc
        },
        |mut a, b| {
            for (x, y) in a.iter_mut().zip(&b) {
                *x = m.add(*x, *y);
            }
            a
        },
    )
    .unwrap_or_else(|| vec![0u64; order])
}

/// S*(k, T) = Σ_{x ∈ F_{q^k}^×} (1+T)^{Tr f̂(ω(x))} mod (p^(N + v_p(K!)), T^D).
pub fn s_star_t(tower: &Tower, k: usize) -> Result<Series<PadicInt>> {
    let prec = tower.spec.prec;
    let p = tower.p();
    let hist = tower.histogram(k, prec.n_eff())?;
    let m = Modulus::new(p, hist.n_eff)?;
    let raw = binom_sum(&m, &hist, prec.d, tower.strategy);
    let declared = hist.n_eff - binom_guard(p, prec.d);
    Ok(Series::new(Var::T, raw.into_iter().map(|c| PadicInt::new(c, p, declared)).collect()))
}

/// Σ over the histogram of ζ^{c t}, ζ a primitive p^m-th root of unity;
/// over A¹ the x = 0 term is included.
pub fn s_chi(hist: &TraceHistogram, m: u32, over: Over, c: u64) -> Result<CycInt> {
    if m > hist.n_eff {
        return Err(Error::ConductorExceedsPrecision { m, n: hist.n_eff });
    }
    let p = hist.p;
    let order = p.pow(m);
    let mut bins = vec![0u64; order as usize];
    for (&t, &cnt) in &hist.counts {
        bins[((t % order) * (c % order) % order) as usize] += cnt;
    }
    if over == Over::A1 {
        bins[((hist.zero_cell % order) * (c % order) % order) as usize] += 1;
    }
    Ok(Cyc::from_poly(p, m, bins.into_iter().map(BigInt::from).collect()))
}

/// L(χ, s) or L*(χ, s) for the character of conductor p^m sending 1 to ζ^c.
#[derive(Debug, Clone, PartialEq)]
pub struct LFunction {
    pub m: u32,
    pub over: Over,
    pub coeffs: Vec<CycInt>,
}

impl LFunction {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn conjugate(&self, c: u64) -> Self {
        LFunction { m: self.m, over: self.over, coeffs: self.coeffs.iter().map(|z| z.conjugate(c)).collect() }
    }

    /// Coefficients as integers when rational, otherwise as their
    /// coordinate vectors in the basis 1, ζ, ζ², ...
    pub fn to_json(&self) -> Value {
        let coeffs: Vec<Value> = self
            .coeffs
            .iter()
            .map(|z| match z.as_scalar() {
                Some(c) => bigint_json(c),
                None => Value::Array(z.coeffs().iter().map(bigint_json).collect()),
            })
            .collect();
        json!({
            "conductor": self.m,
            "over": match self.over { Over::A1 => "A1", Over::Gm => "Gm" },
            "degree": self.degree(),
            "coeffs": coeffs,
        })
    }

    /// Newton polygon with v(q) = 1.
    pub fn np_q_adic(&self, a: usize) -> Result<NewtonPolygon> {
        let np = np_pi_chi_exact(&self.coeffs)?;
        let e = a as i64 * phi(self.coeffs[0].p, self.m) as i64;
        Ok(np.rescale(Rational64::new(1, e), Normalization::QAdic))
    }
}

/// Degree of L (over A¹) or L* (over G_m) at conductor p^m.
pub fn l_degree(p: u64, d: usize, m: u32, over: Over) -> usize {
    let base = p.pow(m.saturating_sub(1)) as usize * d;
    match over {
        Over::A1 => base - 1,
        Over::Gm => base,
    }
}

fn power_sums_chi(tower: &Tower, m: u32, over: Over, c: u64, kmax: usize) -> Result<Vec<CycInt>> {
    let n_eff = tower.spec.prec.n_eff().max(m);
    (1..=kmax).map(|k| s_chi(&*tower.histogram(k, n_eff)?, m, over, c)).collect()
}

/// L-function of the character ζ^c at conductor p^m (m >= 1), computed
/// exactly from power sums up to degree + `margin`; the coefficients past
/// the degree must vanish.
pub fn l_function(tower: &Tower, m: u32, over: Over, c: u64, margin: usize) -> Result<LFunction> {
    if m == 0 {
        return Err(Error::InvalidSpec("conductor exponent must be at least 1".into()));
    }
    let deg = l_degree(tower.p(), tower.spec.d(), m, over);
    let sums = power_sums_chi(tower, m, over, c, deg + margin)?;
    if sums.is_empty() {
        let one = Cyc::from_scalar(tower.p(), m, BigInt::from(1));
        return Ok(LFunction { m, over, coeffs: vec![one] });
    }
    let series = exp_from_power_sums(&sums, Var::S)?;
    let coeffs = series.into_coeffs();
    if let Some(i) = (deg + 1..coeffs.len()).find(|&i| !coeffs[i].is_zero()) {
        return Err(Error::DegreeViolation { index: i, degree: deg });
    }
    Ok(LFunction { m, over, coeffs: coeffs[..=deg].to_vec() })
}

/// C*(χ, s) mod (p^n, s^{K+1}) as Π_j L*(χ, q^j s); factors with q^j ≡ 0 mod p^n are 1.
pub fn c_star_chi_product(tower: &Tower, m: u32, k_max: usize, n: u32) -> Result<Vec<CycMod>> {
    let lstar = l_function(tower, m, Over::Gm, 1, 0)?;
    let p = tower.p();
    let a = tower.spec.a as u32;
    let q = BigInt::from(tower.spec.q());
    let zero = Cyc::from_scalar(p, m, BigInt::from(0));
    let mut acc: Vec<CycInt> = vec![zero.clone(); k_max + 1];
    acc[0] = zero.one_like();
    for j in 0..n.div_ceil(a).max(1) {
        let qj = q.pow(j);
        let mut factor: Vec<CycInt> = vec![zero.clone(); k_max + 1];
        let mut scale = BigInt::from(1);
        for (i, c) in lstar.coeffs.iter().enumerate().take(k_max + 1) {
            factor[i] = c.map(|x| x * &scale);
            scale *= &qj;
        }
        let mut next = vec![zero.clone(); k_max + 1];
        for (i, x) in acc.iter().enumerate() {
            for (l, y) in factor.iter().enumerate().take(k_max + 1 - i) {
                next[i + l] = next[i + l].add(&x.mul(y));
            }
        }
        acc = next;
    }
    Ok(acc.iter().map(|z| z.to_mod(n)).collect())
}

/// C*(χ, s) mod (p^n, s^{K+1}) as exp(Σ S*_k(χ)/(1 - q^k) s^k / k).
pub fn c_star_chi_exp(tower: &Tower, m: u32, k_max: usize, n: u32) -> Result<Vec<CycMod>> {
    let p = tower.p();
    let work = n + guard_digits(p, k_max);
    let sums = power_sums_chi(tower, m, Over::Gm, 1, k_max)?;
    let q = PadicInt::new(tower.spec.q(), p, work);
    let mut qk = q;
    let mut cs = Vec::with_capacity(k_max);
    for s in &sums {
        let inv = qk.one_like().sub(&qk).try_inv().expect("1 - q^k is a unit");
        cs.push(s.to_mod(work).map(|x| x.mul(&inv)));
        qk = qk.mul(&q);
    }
    if cs.is_empty() {
        return Ok(vec![Cyc::from_scalar(p, m, PadicInt::new(1, p, n))]);
    }
    let e = exp_from_power_sums(&cs, Var::S)?;
    Ok(e.coeffs().iter().map(|z| z.reduce_prec(n)).collect())
}

/// C*(χ, s) by both formulas, which must agree.
pub fn c_star_chi(tower: &Tower, m: u32, k_max: usize, n: u32) -> Result<Vec<CycMod>> {
    let a = c_star_chi_product(tower, m, k_max, n)?;
    let b = c_star_chi_exp(tower, m, k_max, n)?;
    if a != b {
        let i = a.iter().zip(&b).position(|(x, y)| x != y).unwrap_or(0);
        return Err(Error::Verification(format!("product and exponential forms of C*(χ,s) differ at s^{i}")));
    }
    Ok(a)
}

/// C*(T, s) mod (p^N, T^D, s^{K+1}).
pub fn c_star_t(tower: &Tower) -> Result<BivSeries> {
    let prec = tower.spec.prec;
    let p = tower.p();
    let q = tower.spec.q();
    let mut cs = Vec::with_capacity(prec.k);
    for k in 1..=prec.k {
        let s = s_star_t(tower, k)?;
        let w = s.prec().unwrap();
        let mm = Modulus::new(p, w)?;
        let qk = PadicInt::from_modulus(mm.pow(q, k as u128), &mm);
        let inv = qk.one_like().sub(&qk).try_inv().expect("1 - q^k is a unit");
        cs.push(s.scale(&inv));
    }
    if cs.is_empty() {
        let one = Series::constant(Var::T, PadicInt::new(1, p, prec.n), prec.d);
        return Ok(Series::new(Var::S, vec![one]));
    }
    let e = exp_from_power_sums(&cs, Var::S)?;
    Ok(e.reduce_prec_all(prec.n))
}

/// Substitute T = ζ - 1 into a T-series.
pub fn specialize_t(f: &Series<PadicInt>, m: u32) -> CycMod {
    let c0 = f.coeff(0);
    let p = c0.p();
    let pi = Cyc::monomial(p, m, 1, c0.one_like()).sub(&Cyc::from_scalar(p, m, c0.one_like()));
    let mut acc = Cyc::from_scalar(p, m, c0.zero_like());
    for c in f.coeffs().iter().rev() {
        acc = acc.mul(&pi).add(&Cyc::from_scalar(p, m, *c));
    }
    acc
}

fn np_pi_chi_exact(coeffs: &[CycInt]) -> Result<NewtonPolygon> {
    let pts: Vec<(i64, Valuation)> = coeffs.iter().enumerate().map(|(i, z)| (i as i64, z.valuation())).collect();
    lower_hull(&pts, Normalization::PiChi)
}

/// π_χ-adic polygon of the exactly known prefix of a truncated series.
pub fn np_pi_chi(coeffs: &[CycMod]) -> Result<NewtonPolygon> {
    let pts: Vec<(i64, Valuation)> = coeffs.iter().enumerate().map(|(i, z)| (i as i64, z.valuation())).collect();
    lower_hull(&exact_prefix(&pts), Normalization::PiChi)
}

/// For each s-coefficient: first T-exponent nonzero mod p^N and that coefficient.
pub fn bivariate_t_valuations(c: &BivSeries) -> Vec<Option<(usize, PadicInt)>> {
    c.coeffs().iter().map(|a| a.valuation().map(|i| (i, *a.coeff(i)))).collect()
}

/// T^{a(p-1)}-adic polygon of a bivariate series, reading v_T mod p^N.
pub fn np_t_adic(c: &BivSeries, a: usize) -> Result<NewtonPolygon> {
    let p = c.coeff(0).coeff(0).p();
    let scale = Rational64::new(1, (a as i64) * (p as i64 - 1));
    let pts: Vec<(i64, Valuation)> = c
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, ak)| {
            let v = match ak.valuation() {
                Some(i) => Valuation::Exact(Rational64::from(i as i64)),
                None => Valuation::AtLeast(Rational64::from(ak.order() as i64)),
            };
            (k as i64, v.scale(scale))
        })
        .collect();
    lower_hull(&exact_prefix(&pts), Normalization::TAdic)
}
