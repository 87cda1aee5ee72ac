//! Strategies and property bodies shared by the property and acceptance suites.

#![allow(dead_code)]

use asw_core::expsum::{l_degree, l_function, s_star_t, trace_histogram, Over, Precision, Tower, TowerSpec};
use asw_core::gf::FieldCtx;
use asw_core::newton::{lower_hull, Normalization};
use asw_core::padic::{binom_guard, binom_pow, phi, PadicInt, Valuation, ZqCtx};
use asw_core::par::Strategy as Exec;
use asw_core::series::{exp_from_power_sums, guard_digits, power_sums_of, Ring, Series, Var};
use asw_core::tower::{witt2_add, WittVec2};
use num_bigint::BigInt;
use num_rational::Rational64;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub type Check = Result<(), TestCaseError>;

pub fn small_field() -> impl Strategy<Value = (u64, usize)> {
    prop_oneof![(Just(2u64), 1usize..=8), (Just(3u64), 1usize..=5), (Just(5u64), 1usize..=3), (Just(7u64), 1usize..=2)]
}

/// (p, f leading-first) with f monic of degree prime to p.
pub fn tower_input() -> impl Strategy<Value = (u64, Vec<u64>)> {
    prop_oneof![Just(2u64), Just(3u64)]
        .prop_flat_map(|p| {
            let degrees: Vec<usize> = (1..=4).filter(|d| d % p as usize != 0).collect();
            (Just(p), proptest::sample::select(degrees))
        })
        .prop_flat_map(|(p, d)| (Just(p), proptest::collection::vec(0..p, d)))
        .prop_map(|(p, rest)| {
            let mut f = vec![1];
            f.extend(rest);
            (p, f)
        })
}

pub fn small_prime() -> impl Strategy<Value = u64> {
    prop_oneof![Just(2u64), Just(3), Just(5)]
}

pub fn histogram_mass(p: u64, f: &[u64], k: usize) -> Check {
    let spec = TowerSpec::over_fp(p, f, Precision::new(p, 4, 6, 4)).unwrap();
    let h = trace_histogram(&spec, k, 6, 1 << 20, Exec::Parallel).unwrap();
    let q_k = p.pow(k as u32);
    prop_assert_eq!(h.counts.values().sum::<u64>(), q_k - 1);
    let s = s_star_t(&Tower::new(spec), k).unwrap();
    prop_assert_eq!(s.coeff(0).value(), (q_k - 1) % p.pow(4));
    Ok(())
}

pub fn teichmuller_order(p: u64, n: usize, idx: u128, prec: u32) -> Check {
    let f = FieldCtx::new(p, n);
    let zq = ZqCtx::new(&f, prec).unwrap();
    let x = f.from_index(idx % (f.size() - 1) + 1);
    let w = zq.teichmuller(&x);
    prop_assert_eq!(zq.pow(&w, f.size() - 1), zq.one());
    prop_assert_eq!(zq.reduce(&w), x);
    Ok(())
}

/// Power sums of integer roots r make exp(Σ c_k s^k / k) = Π 1/(1 - r s) integral.
pub fn exp_log_round_trip(p: u64, roots: &[i64], k: usize) -> Check {
    let sums: Vec<i64> = (1..=k as u32).map(|j| roots.iter().map(|r| r.pow(j)).sum()).collect();
    let big: Vec<BigInt> = sums.iter().map(|&c| BigInt::from(c)).collect();
    let f = exp_from_power_sums(&big, Var::S).unwrap();
    let mut expected = vec![BigInt::from(1)];
    expected.resize(k + 1, BigInt::from(0));
    for &r in roots {
        for j in 1..=k {
            let prev = expected[j - 1].clone();
            expected[j] += prev * r;
        }
    }
    prop_assert_eq!(f.coeffs(), &expected[..]);
    prop_assert_eq!(power_sums_of(&f).unwrap(), big);

    let n = 5u32;
    let c: Vec<PadicInt> = sums.iter().map(|&s| PadicInt::from_i64(s, p, n + guard_digits(p, k))).collect();
    let back = power_sums_of(&exp_from_power_sums(&c, Var::S).unwrap()).unwrap();
    let pn = p.pow(n);
    for (x, y) in c.iter().zip(&back) {
        prop_assert_eq!(x.value() % pn, y.value() % pn);
    }
    Ok(())
}

/// (1+T)^{t1+t2} = (1+T)^{t1} (1+T)^{t2}.
pub fn binomial_homomorphism(p: u64, n: u32, order: usize, a: u64, b: u64) -> Check {
    let g = binom_guard(p, order);
    let t1 = PadicInt::new(a, p, n + g);
    let t2 = PadicInt::new(b, p, n + g);
    let lhs = binom_pow(&t1.add(&t2), order, n).unwrap();
    let rhs = binom_pow(&t1, order, n).unwrap().try_mul(&binom_pow(&t2, order, n).unwrap()).unwrap();
    let vals = |s: &Series<PadicInt>| s.coeffs().iter().map(|c| c.value()).collect::<Vec<_>>();
    prop_assert_eq!(vals(&lhs), vals(&rhs));
    Ok(())
}

/// L(χ^c, s) is the Galois conjugate of L(χ, s); also checks the degree and
/// that the slope sum is the valuation of the leading coefficient.
pub fn galois_covariance(p: u64, f: &[u64], m: u32) -> Check {
    let spec = TowerSpec::over_fp(p, f, Precision::new(p, 4, 4, 2)).unwrap();
    let tower = Tower::new(spec);
    let d = f.len() - 1;
    let base = l_function(&tower, m, Over::A1, 1, 0).unwrap();
    prop_assert_eq!(base.degree(), l_degree(p, d, m, Over::A1));
    prop_assert!(!Ring::is_zero(base.coeffs.last().unwrap()));
    for c in (2..p.pow(m)).filter(|c| c % p != 0) {
        prop_assert_eq!(l_function(&tower, m, Over::A1, c, 0).unwrap(), base.conjugate(c));
    }
    let np = base.np_q_adic(1).unwrap();
    let total: Rational64 = np.slopes().iter().copied().sum();
    let Valuation::Exact(v) = base.coeffs.last().unwrap().valuation() else { unreachable!() };
    prop_assert_eq!(total, v / phi(p, m) as i64);
    Ok(())
}

fn hull_of(vals: &[i64]) -> asw_core::newton::NewtonPolygon {
    let pts: Vec<(i64, Valuation)> =
        vals.iter().enumerate().map(|(i, &v)| (i as i64, Valuation::Exact(Rational64::from(v)))).collect();
    lower_hull(&pts, Normalization::TAdic).unwrap()
}

pub fn hull_convexity(vals: &[i64]) -> Check {
    let np = hull_of(vals);
    let s = np.slopes();
    prop_assert!(s.windows(2).all(|w| w[0] <= w[1]));
    let total: Rational64 = s.iter().copied().sum();
    let (x0, x1) = np.x_range();
    prop_assert_eq!(total, np.y_at_int(x1).unwrap() - np.y_at_int(x0).unwrap());
    for (i, &v) in vals.iter().enumerate() {
        prop_assert!(np.y_at_int(i as i64).unwrap() <= Rational64::from(v));
    }
    Ok(())
}

pub fn rescale_involution(vals: &[i64], num: i64, den: i64) -> Check {
    let np = hull_of(vals);
    let r = Rational64::new(num, den);
    prop_assert_eq!(np.rescale(r, Normalization::TAdic).rescale(r.recip(), Normalization::TAdic), np);
    Ok(())
}

pub fn witt_group_law(p: u64, n: usize, idx: &[u128]) -> Check {
    let f = FieldCtx::new(p, n);
    let e = |i: usize| f.from_index(idx[i] % f.size());
    let u = WittVec2 { y0: e(0), y1: e(1) };
    let v = WittVec2 { y0: e(2), y1: e(3) };
    let w = WittVec2 { y0: e(4), y1: e(5) };
    prop_assert_eq!(witt2_add(&f, &u, &v), witt2_add(&f, &v, &u));
    prop_assert_eq!(witt2_add(&f, &witt2_add(&f, &u, &v), &w), witt2_add(&f, &u, &witt2_add(&f, &v, &w)));
    Ok(())
}
