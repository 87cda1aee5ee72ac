//! Acceptance suite: one pass/fail line per criterion. All comparisons are
//! exact rational or integer equalities; no tolerances are involved.

mod support;

use std::process::ExitCode;
use std::time::Instant;

use asw_core::dwork::{self, char_series};
use asw_core::eigencurve::{component_slopes, components_disjoint, slope_factor, verify_weight_slope_law};
use asw_core::expsum::{
    bivariate_t_valuations, c_star_chi, c_star_t, np_pi_chi, np_t_adic, BivSeries, Precision, Tower, TowerSpec,
};
use asw_core::newton::{hodge_polygon, max_gap, upper_bound_polygon, NewtonPolygon, Normalization};
use asw_core::par::Strategy as Exec;
use asw_core::tower::{
    assemble_p, assemble_p_curve, count_points_trace, count_points_witt, l_slopes, p_m_degree, two_genus,
    verify_periodicity, verify_zeta,
};
use num_rational::Rational64;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn tower(p: u64, f: &[u64], n: u32, d: usize, k: usize) -> Tower {
    Tower::new(TowerSpec::over_fp(p, f, Precision::new(p, n, d, k)).expect("valid tower"))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fmt_slopes(s: &[Rational64]) -> String {
    s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// p = 5, f = x^2 is ordinary: slope 1/2 at m = 1, slopes j/10 at m = 2.
fn ordinary_slopes() -> Outcome {
    let t = tower(5, &[1, 0, 0], 6, 10, 4);
    let (l1, s1) = l_slopes(&t, 1, 1).map_err(|e| e.to_string())?;
    ensure(l1.degree() == 1 && s1 == vec![r(1, 2)], || {
        format!("m=1: degree {}, slopes {}", l1.degree(), fmt_slopes(&s1))
    })?;
    let (l2, s2) = l_slopes(&t, 2, 1).map_err(|e| e.to_string())?;
    let want: Vec<Rational64> = (1..=9).map(|j| r(j, 10)).collect();
    ensure(l2.degree() == 9 && s2 == want, || format!("m=2: degree {}, slopes {}", l2.degree(), fmt_slopes(&s2)))?;
    Ok("m=1 {1/2}; m=2 {1/10..9/10}".into())
}

/// Slopes at higher conductors are the predicted arithmetic progressions.
fn periodicity() -> Outcome {
    let mut notes = Vec::new();
    for (p, f, m_max, degrees) in
        [(2u64, &[1u64, 0, 0, 0][..], 3u32, &[2usize, 5, 11][..]), (3, &[1, 0, 0][..], 2, &[1, 5][..])]
    {
        let t = tower(p, f, 6, 10, 4);
        let reports = verify_periodicity(&t, m_max, 1).map_err(|e| e.to_string())?;
        ensure(reports.len() == m_max as usize, || format!("p={p}: {} reports", reports.len()))?;
        for (rep, &deg) in reports.iter().zip(degrees) {
            ensure(rep.verdict.is_match() && rep.slopes.len() == deg, || {
                format!(
                    "p={p} m={}: slopes {} vs predicted {}",
                    rep.m,
                    fmt_slopes(&rep.slopes),
                    fmt_slopes(&rep.predicted)
                )
            })?;
        }
        notes.push(format!("p={p} m<={m_max}"));
    }
    Ok(notes.join(", "))
}

fn criterion_towers() -> [(u64, &'static [u64]); 2] {
    [(2, &[1, 0, 0, 0]), (3, &[1, 0, 0])]
}

/// Dwork's determinant and the exponential-sum series agree mod (p^6, T^40, s^7).
fn pathway_equivalence() -> Outcome {
    for (p, f) in criterion_towers() {
        let t = tower(p, f, 6, 40, 6);
        let ex = c_star_t(&t).map_err(|e| e.to_string())?;
        let dw = char_series(&t.spec, Exec::Parallel).map_err(|e| e.to_string())?.t_form;
        ensure(ex.order() == 7 && ex.coeff(0).order() == 40, || format!("p={p}: unexpected truncation"))?;
        ensure(ex == dw, || format!("p={p}: pathways differ"))?;
    }
    Ok("p=2 x^3, p=3 x^2 mod (p^6, T^40, s^7)".into())
}

/// Hodge bound for both pathways; exact touching with unit leading
/// coefficients at k in {0, 1, d, d+1, 2d, 2d+1}.
fn hodge_and_turning_points() -> Outcome {
    let mut touched = 0;
    for (p, f) in criterion_towers() {
        let k_max = 6;
        let t = tower(p, f, 6, 40, k_max);
        let d = f.len() - 1;
        let ex = c_star_t(&t).map_err(|e| e.to_string())?;
        let dw = char_series(&t.spec, Exec::Parallel).map_err(|e| e.to_string())?;
        let hodge = hodge_polygon(d as u64, k_max);
        let np_ex = np_t_adic(&ex, 1).map_err(|e| e.to_string())?;
        let np_dw = dwork::np_t_adic(&dw, d, p).map_err(|e| e.to_string())?;
        for (name, np) in [("expsum", &np_ex), ("dwork", &np_dw)] {
            ensure(np.x_range().1 == k_max as i64, || format!("p={p} {name}: polygon stops at {}", np.x_range().1))?;
            ensure(np.lies_above(&hodge), || format!("p={p} {name}: polygon dips below Hodge"))?;
        }
        for c in [&ex, &dw.t_form] {
            touched += turning_points(c, p, d, k_max)?;
        }
    }
    Ok(format!("{touched} turning points exact with unit leading coefficient"))
}

fn turning_points(c: &BivSeries, p: u64, d: usize, k_max: usize) -> Result<usize, String> {
    let vals = bivariate_t_valuations(c);
    let e = (p - 1) as i64;
    let mut n = 0;
    for k in [0, 1, d, d + 1, 2 * d, 2 * d + 1].into_iter().filter(|&k| k <= k_max) {
        let hodge = r((k * k.saturating_sub(1)) as i64, 2 * d as i64);
        let Some((i, lead)) = vals[k] else { return Err(format!("p={p} k={k}: coefficient vanishes mod T^D")) };
        ensure(r(i as i64, e) == hodge, || format!("p={p} k={k}: v = {} vs Hodge {hodge}", r(i as i64, e)))?;
        ensure(lead.value() % p != 0, || format!("p={p} k={k}: leading coefficient not a unit"))?;
        n += 1;
    }
    Ok(n)
}

/// Computed polygons lie on or below the upper bound; the maximal gap is (d-1)^2/(8d).
fn upper_bound_and_gap() -> Outcome {
    let k_max = 6;
    let mut checked = 0;
    for (p, f) in criterion_towers() {
        let d = (f.len() - 1) as u64;
        let t = tower(p, f, 10, 40, k_max);
        let upper = upper_bound_polygon(d, k_max);
        let np_t = np_t_adic(&c_star_t(&t).map_err(|e| e.to_string())?, 1).map_err(|e| e.to_string())?;
        ensure(np_t.lies_below(&upper), || format!("p={p}: T-adic polygon above the upper bound"))?;
        for m in 1..=2 {
            let np = chi_polygon(&t, m, k_max, 10)?;
            ensure(np.x_range().1 == k_max as i64, || format!("p={p} m={m}: polygon stops at {}", np.x_range().1))?;
            ensure(np.lies_below(&upper), || format!("p={p} m={m}: polygon above the upper bound"))?;
            checked += 1;
        }
    }
    for d in [2u64, 3, 4, 5, 7] {
        let want = r(((d - 1) * (d - 1)) as i64, 8 * d as i64);
        ensure(max_gap(d).0 == want, || format!("d={d}: gap {} vs {want}", max_gap(d).0))?;
    }
    Ok(format!("{checked} C*(chi, s) polygons below the bound; gaps for d in {{2,3,4,5,7}}"))
}

/// π_χ^{a(p-1)}-adic polygon of C*(χ, s) up to s^k_max.
fn chi_polygon(t: &Tower, m: u32, k_max: usize, n: u32) -> Result<NewtonPolygon, String> {
    let c = c_star_chi(t, m, k_max, n).map_err(|e| e.to_string())?;
    let np = np_pi_chi(&c).map_err(|e| e.to_string())?;
    Ok(np.rescale(r(1, t.spec.a as i64 * (t.p() as i64 - 1)), Normalization::TAdic))
}

/// For p = 2, f = x^3 the normalized polygons of C*(χ, s) agree for m = 1, 2, 3.
fn conductor_independence() -> Outcome {
    let k_max = 6;
    let t = tower(2, &[1, 0, 0, 0], 10, 40, k_max);
    let base = chi_polygon(&t, 1, k_max, 10)?;
    ensure(base.x_range().1 == k_max as i64, || "m=1 polygon is not fully determined".into())?;
    for m in 2..=3 {
        let np = chi_polygon(&t, m, k_max, 10)?;
        ensure(np.vertices() == base.vertices(), || {
            format!("m={m}: slopes {} vs {}", fmt_slopes(&np.slopes()), fmt_slopes(&base.slopes()))
        })?;
    }
    Ok(format!("slopes {}", fmt_slopes(&base.slopes())))
}

/// Witt-vector counts, character-sum counts and the zeta function agree.
fn curve_consistency() -> Outcome {
    let k_max = 6;
    for (p, f) in criterion_towers() {
        let d = f.len() - 1;
        let t = tower(p, f, 6, 10, k_max);
        for m in 1..=2 {
            let mut counts = Vec::new();
            for k in 1..=k_max {
                let w = count_points_witt(&t.spec, m, k, 1 << 24).map_err(|e| e.to_string())?;
                let c = count_points_trace(&t, m, k).map_err(|e| e.to_string())?;
                ensure(w == c, || format!("p={p} m={m} k={k}: witt {w} vs trace {c}"))?;
                counts.push(c);
            }
            let pm = assemble_p(&t, m).map_err(|e| e.to_string())?;
            ensure(pm.len() - 1 == p_m_degree(p, d, m), || format!("p={p} m={m}: deg P = {}", pm.len() - 1))?;
            let curve = assemble_p_curve(&t, m).map_err(|e| e.to_string())?;
            ensure(curve.len() - 1 == two_genus(p, d, m), || format!("p={p} m={m}: deg P(C_m) = {}", curve.len() - 1))?;
            verify_zeta(&t, m, k_max, &counts).map_err(|e| e.to_string())?;
        }
    }
    Ok("counts, deg P(m, s), 2g(C_m) and zeta for m <= 2, k <= 6".into())
}

/// Four degree-3 components for p = 2, f = x^3 obey the weight-slope law at m = 2, 3.
fn eigencurve() -> Outcome {
    let t = tower(2, &[1, 0, 0, 0], 8, 60, 20);
    let family = component_slopes(&t, 1).map_err(|e| e.to_string())?;
    let c = c_star_t(&t).map_err(|e| e.to_string())?;
    let fact = slope_factor(&c, 2, 1, 3, 4).map_err(|e| e.to_string())?;
    ensure(fact.factors.len() == 4, || format!("{} components", fact.factors.len()))?;
    for f in &fact.factors {
        ensure(f.degree() == 3 && f.leading_unit, || {
            format!("component {}: degree {}, unit {}", f.i, f.degree(), f.leading_unit)
        })?;
    }
    fact.check_product(&c).map_err(|e| e.to_string())?;
    let checks = verify_weight_slope_law(&fact, &family, 2, 1, &[2, 3]).map_err(|e| e.to_string())?;
    for ch in &checks {
        ensure(ch.pass, || {
            format!(
                "m={} i={}: {} vs {}",
                ch.conductor,
                ch.component,
                fmt_slopes(&ch.slopes),
                fmt_slopes(&ch.predicted)
            )
        })?;
    }
    ensure(components_disjoint(&checks), || "components interleave".into())?;
    let prec: Vec<String> = fact.factors.iter().map(|f| f.t_prec.to_string()).collect();
    Ok(format!("{} checks; T-precision [{}]", checks.len(), prec.join(", ")))
}

/// The always-on property suites, replayed with a fixed seed.
fn property_suites() -> Outcome {
    fn run<S: Strategy>(
        name: &str,
        cases: u32,
        strat: S,
        check: impl Fn(S::Value) -> support::Check,
    ) -> Result<(), String> {
        let rng = TestRng::deterministic_rng(RngAlgorithm::ChaCha);
        let mut runner =
            TestRunner::new_with_rng(Config { cases, failure_persistence: None, ..Config::default() }, rng);
        runner.run(&strat, check).map_err(|e| format!("{name}: {e}"))
    }
    use support::*;
    run("histogram mass", 12, (tower_input(), 1usize..=4), |((p, f), k)| histogram_mass(p, &f, k))?;
    run("teichmuller order", 64, (small_field(), 1u128..4096, 1u32..6), |((p, n), i, e)| {
        teichmuller_order(p, n, i, e)
    })?;
    run(
        "exp/log round trip",
        64,
        (small_prime(), proptest::collection::vec(-9i64..10, 1..5), 1usize..10),
        |(p, rs, k)| exp_log_round_trip(p, &rs, k),
    )?;
    run(
        "binomial homomorphism",
        64,
        (small_prime(), 2u32..6, 2usize..24, 0u64..1_000_000, 0u64..1_000_000),
        |(p, n, o, a, b)| binomial_homomorphism(p, n, o, a, b),
    )?;
    run("galois covariance", 12, (tower_input(), 1u32..=2), |((p, f), m)| galois_covariance(p, &f, m))?;
    run("hull convexity", 64, proptest::collection::vec(0i64..40, 2..14), |v| hull_convexity(&v))?;
    run("rescale involution", 64, (proptest::collection::vec(0i64..40, 2..10), 1i64..9, 1i64..9), |(v, a, b)| {
        rescale_involution(&v, a, b)
    })?;
    run("witt addition", 64, (small_field(), proptest::collection::vec(0u128..4096, 6)), |((p, n), idx)| {
        witt_group_law(p, n, &idx)
    })?;
    Ok("8 suites".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("ordinary slopes", ordinary_slopes),
        ("slope periodicity", periodicity),
        ("pathway equivalence", pathway_equivalence),
        ("Hodge bound and turning points", hodge_and_turning_points),
        ("upper bound and maximal gap", upper_bound_and_gap),
        ("conductor independence", conductor_independence),
        ("curve-side consistency", curve_consistency),
        ("eigencurve structure", eigencurve),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {}. {name} ({detail}; tolerance: exact; {secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {}. {name} ({why}; tolerance: exact; {secs:.1}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
