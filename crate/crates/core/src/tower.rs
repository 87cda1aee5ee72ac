//! Curve side of the tower: point counts on C_1, C_2 from the Witt-vector
//! equations, point counts from trace histograms, zeta assembly, and the
//! slope-periodicity check.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::Rational64;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::expsum::{l_function, s_chi, LFunction, Over, Tower, TowerSpec};
use crate::gf::{FieldCtx, FqElt};
use crate::newton::{lower_hull, rational_json, NewtonPolygon, Normalization};
use crate::padic::Valuation;
use crate::series::{power_sums_of, Ring, Series, Var};

/// Length-2 Witt vector over a finite field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WittVec2 {
    pub y0: FqElt,
    pub y1: FqElt,
}

/// Coefficients C(p, i)/p mod p for 1 <= i < p.
fn witt_carry_coeffs(p: u64) -> Vec<u64> {
    (1..p).map(|i| (binomial(p, i) / p) % p).collect()
}

/// (a0, a1) + (b0, b1) = (a0 + b0, a1 + b1 - Σ_{i=1}^{p-1} (C(p,i)/p) a0^i b0^{p-i}).
pub fn witt2_add(field: &FieldCtx, u: &WittVec2, v: &WittVec2) -> WittVec2 {
    let p = field.p;
    let mut carry = field.zero();
    for (idx, c) in witt_carry_coeffs(p).into_iter().enumerate() {
        let i = idx as u128 + 1;
        let term = field.mul(&field.pow(&u.y0, i), &field.pow(&v.y0, p as u128 - i));
        carry = field.add(&carry, &field.scale(c, &term));
    }
    WittVec2 { y0: field.add(&u.y0, &v.y0), y1: field.sub(&field.add(&u.y1, &v.y1), &carry) }
}

pub fn witt2_frobenius(field: &FieldCtx, u: &WittVec2) -> WittVec2 {
    WittVec2 { y0: field.frobenius(&u.y0), y1: field.frobenius(&u.y1) }
}

/// Solutions of y^p - y = z, indexed by the field index of z.
fn artin_schreier_table(field: &FieldCtx) -> Vec<Vec<FqElt>> {
    let mut table = vec![Vec::new(); field.size() as usize];
    for y in field.enumerate() {
        let z = field.sub(&field.frobenius(&y), &y);
        table[field.index_of(&z) as usize].push(y);
    }
    table
}

/// #C_m(F_{q^k}) for m <= 2 by solving y^F - y = Σ (b_i x^i, 0) directly.
pub fn count_points_witt(spec: &TowerSpec, m: u32, k: usize, budget: u64) -> Result<u64> {
    if m > 2 {
        return Err(Error::InvalidSpec("Witt-vector counting is implemented for m <= 2".into()));
    }
    let size = (spec.q() as u128).pow(k as u32);
    if size > budget as u128 {
        return Err(Error::BudgetExceeded { size, budget });
    }
    if m == 0 {
        return Ok(size as u64);
    }
    let field = FieldCtx::for_extension(spec.p, spec.a, k)?;
    let coeffs: Vec<FqElt> = spec.f.iter().map(|b| field.embed(&b.0)).collect();
    let table = artin_schreier_table(&field);
    let zero = WittVec2 { y0: field.zero(), y1: field.zero() };
    let mut total = 0u64;
    for x in field.enumerate() {
        // right-hand side as a Witt sum of the monomial vectors (b_i x^i, 0)
        let mut rhs = zero.clone();
        let mut xi = field.one();
        for b in &coeffs {
            let mono = WittVec2 { y0: field.mul(b, &xi), y1: field.zero() };
            rhs = witt2_add(&field, &rhs, &mono);
            xi = field.mul(&xi, &x);
        }
        let fiber0 = &table[field.index_of(&rhs.y0) as usize];
        if m == 1 {
            total += fiber0.len() as u64;
            continue;
        }
        // y^F = y + rhs: second coordinate gives y1^p - y1 = rhs1 - carry(y0, rhs0)
        for y0 in fiber0 {
            let sum = witt2_add(&field, &WittVec2 { y0: y0.clone(), y1: field.zero() }, &rhs);
            total += table[field.index_of(&sum.y1) as usize].len() as u64;
        }
    }
    Ok(total)
}

/// #C_m(F_{q^k}) = p^m #{x : Tr f̂(ω(x)) ≡ 0 mod p^m}, cross-checked against
/// the sum of A¹ character sums over all characters of conductor <= p^m.
pub fn count_points_trace(tower: &Tower, m: u32, k: usize) -> Result<u64> {
    let p = tower.p();
    let n_eff = tower.spec.prec.n_eff();
    if m > n_eff {
        return Err(Error::ConductorExceedsPrecision { m, n: n_eff });
    }
    let hist = tower.histogram(k, n_eff)?;
    let pm = p.pow(m);
    let mut zeros = hist.counts.iter().filter(|(t, _)| *t % pm == 0).map(|(_, c)| *c).sum::<u64>();
    if hist.zero_cell % pm == 0 {
        zeros += 1;
    }
    let direct = pm * zeros;
    let by_chars = character_sum_count(&hist, m)?;
    if BigInt::from(direct) != by_chars {
        return Err(Error::Verification(format!("point count {direct} != character sum {by_chars} (m={m}, k={k})")));
    }
    Ok(direct)
}

fn character_sum_count(hist: &crate::expsum::TraceHistogram, m: u32) -> Result<BigInt> {
    let p = hist.p;
    let mut total = BigInt::zero();
    for j in 0..=m {
        let order = p.pow(j);
        let mut orbit: Option<crate::padic::CycInt> = None;
        for c in (1..order.max(2)).filter(|c| c % p != 0 || j == 0) {
            let s = s_chi(hist, j, Over::A1, c)?;
            orbit = Some(match orbit {
                Some(o) => o.add(&s),
                None => s,
            });
            if j == 0 {
                break;
            }
        }
        let orbit = orbit.expect("nonempty orbit");
        let r = orbit.as_scalar().ok_or(Error::TraceNotRational(j))?;
        total += r;
    }
    Ok(total)
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// deg P(m, s) = (p-1) p^{m-1} (p^{m-1} d - 1).
pub fn p_m_degree(p: u64, d: usize, m: u32) -> usize {
    ((p - 1) * p.pow(m - 1)) as usize * (p.pow(m - 1) as usize * d - 1)
}

/// 2g(C_m) = (p-1)(d (p^{2m}-1)/(p^2-1) - (p^m-1)/(p-1)).
pub fn two_genus(p: u64, d: usize, m: u32) -> usize {
    let d = d as u64;
    ((p - 1) * (d * (p.pow(2 * m) - 1) / (p * p - 1) - (p.pow(m) - 1) / (p - 1))) as usize
}

/// P(m, s) = Π over characters of exact conductor p^m of L(χ, s).
pub fn assemble_p(tower: &Tower, m: u32) -> Result<Vec<BigInt>> {
    let p = tower.p();
    let l = l_function(tower, m, Over::A1, 1, 1)?;
    let order = p.pow(m);
    let mut acc: Vec<crate::padic::CycInt> = vec![l.coeffs[0].one_like()];
    for c in (1..order).filter(|c| c % p != 0) {
        let conj = l.conjugate(c);
        let mut out = vec![acc[0].zero_like(); acc.len() + conj.coeffs.len() - 1];
        for (i, x) in acc.iter().enumerate() {
            for (j, y) in conj.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&x.mul(y));
            }
        }
        acc = out;
    }
    let mut ints = Vec::with_capacity(acc.len());
    for (i, z) in acc.iter().enumerate() {
        ints.push(z.as_scalar().ok_or(Error::NonIntegerCoefficient(i))?.clone());
    }
    let want = p_m_degree(p, tower.spec.d(), m);
    if ints.len() - 1 != want {
        return Err(Error::Verification(format!("deg P({m}, s) = {} but expected {want}", ints.len() - 1)));
    }
    Ok(ints)
}

/// P(C_m, s) = Π_{j=1}^m P(j, s), with its degree checked against 2g(C_m).
pub fn assemble_p_curve(tower: &Tower, m: u32) -> Result<Vec<BigInt>> {
    let mut acc = vec![BigInt::from(1)];
    for j in 1..=m {
        acc = poly_mul(&acc, &assemble_p(tower, j)?);
    }
    let want = two_genus(tower.p(), tower.spec.d(), m);
    if acc.len() - 1 != want {
        return Err(Error::Verification(format!("deg P(C_{m}, s) = {} but 2g = {want}", acc.len() - 1)));
    }
    Ok(acc)
}

/// Check log P(C_m, s) = Σ (#C_m(F_{q^k}) - q^k) s^k / k for k <= k_max.
pub fn verify_zeta(tower: &Tower, m: u32, k_max: usize, counts: &[u64]) -> Result<()> {
    let pc = assemble_p_curve(tower, m)?;
    let mut coeffs = pc.clone();
    coeffs.resize(k_max + 1, BigInt::zero());
    coeffs.truncate(k_max + 1);
    let sums = power_sums_of(&Series::new(Var::S, coeffs))?;
    let q = BigInt::from(tower.spec.q());
    for (k, s) in sums.iter().enumerate() {
        let expect = BigInt::from(counts[k]) - q.pow(k as u32 + 1);
        if *s != expect {
            return Err(Error::Verification(format!("zeta mismatch at k={}: {s} vs {expect}", k + 1)));
        }
    }
    Ok(())
}

/// q-adic Newton polygon of a polynomial with integer coefficients.
pub fn np_integer_poly(coeffs: &[BigInt], p: u64, a: usize) -> Result<NewtonPolygon> {
    let pts: Vec<(i64, Valuation)> = coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if Zero::is_zero(c) {
                return (i as i64, Valuation::Infinite);
            }
            let mut v = 0i64;
            let mut x = c.clone();
            let pb = BigInt::from(p);
            while Zero::is_zero(&(&x % &pb)) {
                x /= &pb;
                v += 1;
            }
            (i as i64, Valuation::Exact(Rational64::new(v, a as i64)))
        })
        .collect();
    lower_hull(&pts, Normalization::QAdic)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Match,
    Mismatch(String),
}

impl Verdict {
    pub fn is_match(&self) -> bool {
        *self == Verdict::Match
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeReport {
    pub m: u32,
    pub slopes: Vec<Rational64>,
    pub predicted: Vec<Rational64>,
    pub verdict: Verdict,
}

fn sorted(mut v: Vec<Rational64>) -> Vec<Rational64> {
    v.sort();
    v
}

/// Slopes predicted at conductor p^m from the reference slopes α at p^{m0}:
/// ∪_{i < p^{m-m0}} {i / p^{m-m0}, (α_j + i) / p^{m-m0}} minus one copy of 0.
pub fn predicted_slopes(alphas: &[Rational64], p: u64, m0: u32, m: u32) -> Vec<Rational64> {
    let scale = p.pow(m - m0) as i64;
    let mut out = Vec::new();
    for i in 0..scale {
        if i > 0 {
            out.push(Rational64::new(i, scale));
        }
        for a in alphas {
            out.push((a + i) / scale);
        }
    }
    sorted(out)
}

impl SlopeReport {
    pub fn to_json(&self) -> Value {
        let verdict = match &self.verdict {
            Verdict::Match => json!("match"),
            Verdict::Mismatch(s) => json!({ "mismatch": s }),
        };
        json!({
            "m": self.m,
            "slopes": self.slopes.iter().map(rational_json).collect::<Vec<_>>(),
            "predicted": self.predicted.iter().map(rational_json).collect::<Vec<_>>(),
            "verdict": verdict,
        })
    }

    /// CSV rows: m, slope_num, slope_den, multiplicity, predicted, verdict.
    pub fn csv_rows(&self) -> Vec<String> {
        let mut tally: BTreeMap<Rational64, (usize, usize)> = BTreeMap::new();
        for s in &self.slopes {
            tally.entry(*s).or_default().0 += 1;
        }
        for s in &self.predicted {
            tally.entry(*s).or_default().1 += 1;
        }
        let verdict = if self.verdict.is_match() { "match" } else { "mismatch" };
        tally
            .into_iter()
            .map(|(s, (c, pr))| format!("{},{},{},{},{},{}", self.m, s.numer(), s.denom(), c, pr, verdict))
            .collect()
    }
}

pub const CSV_HEADER: &str = "m,slope_num,slope_den,multiplicity,predicted,verdict";

/// q-adic slopes of L(χ, s) at conductor p^m.
pub fn l_slopes(tower: &Tower, m: u32, margin: usize) -> Result<(LFunction, Vec<Rational64>)> {
    let l = l_function(tower, m, Over::A1, 1, margin)?;
    let slopes = l.np_q_adic(tower.spec.a)?.slopes();
    Ok((l, slopes))
}

/// Compare computed slopes at m0..=m_max with the periodicity prediction.
pub fn verify_periodicity(tower: &Tower, m_max: u32, margin: usize) -> Result<Vec<SlopeReport>> {
    let p = tower.p();
    let m0 = tower.spec.m0();
    if m_max < m0 {
        return Ok(Vec::new());
    }
    let (_, alphas) = l_slopes(tower, m0, margin)?;
    let mut out = Vec::new();
    for m in m0..=m_max {
        let slopes = if m == m0 { alphas.clone() } else { l_slopes(tower, m, margin)?.1 };
        let predicted = predicted_slopes(&alphas, p, m0, m);
        let want = p.pow(m - 1) as usize * tower.spec.d() - 1;
        let verdict = if slopes.len() != want {
            Verdict::Mismatch(format!("{} slopes, expected {want}", slopes.len()))
        } else if sorted(slopes.clone()) == predicted {
            Verdict::Match
        } else {
            Verdict::Mismatch("slope multisets differ".into())
        };
        out.push(SlopeReport { m, slopes, predicted, verdict });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expsum::Precision;

    fn tower(p: u64, f: &[u64], n: u32) -> Tower {
        Tower::new(TowerSpec::over_fp(p, f, Precision::new(p, n, 4, 2)).unwrap())
    }

    #[test]
    fn witt_examples() {
        let f = FieldCtx::new(2, 2);
        let x = FqElt(vec![0, 1]);
        let y = FqElt(vec![1, 1]);
        let a = WittVec2 { y0: x.clone(), y1: f.zero() };
        let b = WittVec2 { y0: f.zero(), y1: y.clone() };
        assert_eq!(witt2_add(&f, &a, &b), WittVec2 { y0: x.clone(), y1: y.clone() });
        // p = 2: S1 = a1 + b1 + a0 b0
        let c = WittVec2 { y0: y.clone(), y1: f.one() };
        let s = witt2_add(&f, &a, &c);
        assert_eq!(s.y1, f.add(&f.one(), &f.mul(&x, &y)));
        let zero = WittVec2 { y0: f.zero(), y1: f.zero() };
        assert_eq!(witt2_add(&f, &c, &zero), c);
        assert_eq!(witt_carry_coeffs(3), vec![1, 1]);
        assert_eq!(witt_carry_coeffs(5), vec![1, 2, 2, 1]);
    }

    /// Witt addition through ghost components over Z/p^2 Teichmüller-free lifts:
    /// for F_p, (a0, a1) ↦ a0 + p a1 is not additive, but (a0,0)+(b0,0) has
    /// first ghost a0 + b0 and second ghost a0^p + b0^p.
    #[test]
    fn witt_addition_matches_integer_ghosts() {
        for p in [2u64, 3, 5] {
            let f = FieldCtx::new(p, 1);
            for a0 in 0..p {
                for b0 in 0..p {
                    let s = witt2_add(
                        &f,
                        &WittVec2 { y0: f.constant(a0), y1: f.zero() },
                        &WittVec2 { y0: f.constant(b0), y1: f.zero() },
                    );
                    // integer Witt sum: S1 = (a0^p + b0^p - (a0+b0)^p) / p
                    let num = a0.pow(p as u32) as i64 + b0.pow(p as u32) as i64 - (a0 + b0).pow(p as u32) as i64;
                    assert_eq!(s.y1.0[0] as i64, (num / p as i64).rem_euclid(p as i64));
                }
            }
        }
    }

    #[test]
    fn witt_point_counts() {
        let s = TowerSpec::over_fp(2, &[1, 0, 0, 0], Precision::new(2, 4, 4, 2)).unwrap();
        assert_eq!(count_points_witt(&s, 1, 1, 1000).unwrap(), 2);
        assert_eq!(count_points_witt(&s, 0, 3, 1000).unwrap(), 8);
    }

    #[test]
    fn counts_agree() {
        for (p, f) in [(2u64, vec![1u64, 0, 0, 0]), (3, vec![1, 0, 0]), (2, vec![1, 1, 0, 1]), (5, vec![1, 0, 1])] {
            let t = tower(p, &f, 4);
            for m in 0..=2 {
                for k in 1..=3 {
                    let w = count_points_witt(&t.spec, m, k, 100_000).unwrap();
                    assert_eq!(w, count_points_trace(&t, m, k).unwrap(), "p={p} m={m} k={k}");
                }
            }
        }
    }

    #[test]
    fn p_polynomials() {
        let t = tower(2, &[1, 0, 0, 0], 4);
        let p1 = assemble_p(&t, 1).unwrap();
        assert_eq!(p1, vec![BigInt::from(1), BigInt::zero(), BigInt::from(2)]);
        assert_eq!(assemble_p(&t, 2).unwrap().len() - 1, 10);
        assert_eq!(p_m_degree(2, 3, 2), 10);
        assert_eq!(two_genus(2, 3, 2), 12);
        let counts: Vec<u64> = (1..=4).map(|k| count_points_trace(&t, 2, k).unwrap()).collect();
        verify_zeta(&t, 2, 4, &counts).unwrap();
    }

    #[test]
    fn genus_formula_matches_sum() {
        for p in [2u64, 3, 5] {
            for d in [1usize, 2, 3, 4] {
                for m in 1..=3u32 {
                    let sum: usize = (1..=m).map(|k| p_m_degree(p, d, k)).sum();
                    assert_eq!(two_genus(p, d, m), sum);
                }
            }
        }
    }

    #[test]
    fn prediction_formula() {
        let a = vec![Rational64::new(1, 2); 2];
        let got = predicted_slopes(&a, 2, 1, 2);
        let want: Vec<Rational64> =
            [(1, 4), (1, 4), (1, 2), (3, 4), (3, 4)].iter().map(|&(n, d)| Rational64::new(n, d)).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn periodicity_small() {
        let t = tower(2, &[1, 0, 0, 0], 4);
        let reports = verify_periodicity(&t, 2, 1).unwrap();
        assert_eq!(reports.len(), 2);
        assert!(reports.iter().all(|r| r.verdict.is_match()));
        let rows = reports[1].csv_rows();
        assert_eq!(rows[0], "2,1,4,2,2,match");
    }
}
