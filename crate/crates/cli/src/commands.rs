//! One function per subcommand; each is a thin veneer over a library call.

use asw_core::dwork::char_series;
use asw_core::eigencurve::{
    component_slopes, components_disjoint, render_components_svg, slope_factor, verify_weight_slope_law,
};
use asw_core::expsum::{c_star_t, l_function, np_t_adic, s_star_t, BivSeries, HistogramCache, Over};
use asw_core::newton::{hodge_polygon, rational_json, render_svg, upper_bound_polygon, NewtonPolygon};
use asw_core::tower::{
    assemble_p_curve, count_points_trace, count_points_witt, l_slopes, predicted_slopes, two_genus, verify_periodicity,
    verify_zeta, SlopeReport, Verdict, CSV_HEADER,
};
use asw_core::{Error, Result};
use num_rational::Rational64;
use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};

/// Rendered output, plus a description of the failed check if any.
pub struct Output {
    pub body: String,
    pub failure: Option<String>,
}

impl Output {
    fn ok(body: String) -> Self {
        Output { body, failure: None }
    }
}

fn json_out(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}

fn unsupported(cfg: &RunConfig, cmd: &str) -> Error {
    Error::InvalidSpec(format!("format {} is not available for {cmd}", cfg.format.name()))
}

fn with_config(cfg: &RunConfig, fields: Value) -> Value {
    let mut map = Map::new();
    map.insert("config".into(), cfg.to_json());
    if let Value::Object(m) = fields {
        map.extend(m);
    }
    Value::Object(map)
}

fn slopes_json(s: &[Rational64]) -> Value {
    Value::Array(s.iter().map(rational_json).collect())
}

fn biv_json(c: &BivSeries) -> Value {
    Value::Array(
        c.coeffs().iter().map(|t| Value::Array(t.coeffs().iter().map(|x| json!(x.signed())).collect())).collect(),
    )
}

pub fn cmd_expsum(cfg: &RunConfig, k: usize) -> Result<Output> {
    if k == 0 {
        return Err(Error::InvalidSpec("k must be at least 1".into()));
    }
    let tower = cfg.tower();
    let s = s_star_t(&tower, k)?;
    let coeffs: Vec<i64> = s.coeffs().iter().map(|x| x.signed()).collect();
    match cfg.format {
        Format::Json => Ok(Output::ok(json_out(with_config(
            cfg,
            json!({ "k": k, "s_star": coeffs, "t_valuation": s.valuation() }),
        )))),
        Format::Csv => {
            let mut out = String::from("i,coefficient\n");
            for (i, c) in coeffs.iter().enumerate() {
                out.push_str(&format!("{i},{c}\n"));
            }
            Ok(Output::ok(out))
        }
        Format::Svg => Err(unsupported(cfg, "expsum")),
    }
}

pub fn cmd_lfun(cfg: &RunConfig, m: u32, margin: usize) -> Result<Output> {
    let tower = cfg.tower();
    let l = l_function(&tower, m, Over::A1, 1, margin)?;
    let np = l.np_q_adic(cfg.spec.a)?;
    match cfg.format {
        Format::Json => {
            let mut v = with_config(cfg, l.to_json());
            v["slopes"] = slopes_json(&np.slopes());
            v["polygon"] = np.to_json();
            Ok(Output::ok(json_out(v)))
        }
        Format::Svg => Ok(Output::ok(render_svg(&format!("L at conductor p^{m}"), &[("q-adic", &np, "#1f77b4")]))),
        Format::Csv => Err(unsupported(cfg, "lfun")),
    }
}

pub enum Method {
    Expsum,
    Dwork,
    Both,
}

fn polygon_layers(cfg: &RunConfig, c: &BivSeries) -> Result<(NewtonPolygon, NewtonPolygon, NewtonPolygon)> {
    let np = np_t_adic(c, cfg.spec.a)?;
    let d = cfg.spec.d() as u64;
    let k = cfg.spec.prec.k;
    Ok((np, hodge_polygon(d, k), upper_bound_polygon(d, k)))
}

pub fn cmd_charfn(cfg: &RunConfig, method: Method) -> Result<Output> {
    let tower = cfg.tower();
    let (c, agree, name) = match method {
        Method::Expsum => (c_star_t(&tower)?, None, "expsum"),
        Method::Dwork => (char_series(&cfg.spec, cfg.strategy)?.t_form, None, "dwork"),
        Method::Both => {
            let e = c_star_t(&tower)?;
            let w = char_series(&cfg.spec, cfg.strategy)?.t_form;
            let same = e == w;
            (e, Some(same), "both")
        }
    };
    let failure = match agree {
        Some(false) => Some("the exponential-sum and Dwork pathways disagree".to_string()),
        _ => None,
    };
    let (np, hodge, upper) = polygon_layers(cfg, &c)?;
    let body = match cfg.format {
        Format::Json => {
            let mut v = with_config(
                cfg,
                json!({
                    "method": name,
                    "coeffs": biv_json(&c),
                    "polygon": np.to_json(),
                    "hodge": hodge.to_json(),
                    "upper_bound": upper.to_json(),
                }),
            );
            if let Some(a) = agree {
                v["agree"] = json!(a);
            }
            json_out(v)
        }
        Format::Svg => render_svg(
            "T-adic polygon of C*(T, s)",
            &[("computed", &np, "#1f77b4"), ("Hodge", &hodge, "#2ca02c"), ("upper bound", &upper, "#d62728")],
        ),
        Format::Csv => return Err(unsupported(cfg, "charfn")),
    };
    Ok(Output { body, failure })
}

fn slope_report_csv(reports: &[SlopeReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        for row in r.csv_rows() {
            out.push_str(&row);
            out.push('\n');
        }
    }
    out
}

pub fn cmd_slopes(cfg: &RunConfig, m: u32, margin: usize) -> Result<Output> {
    let tower = cfg.tower();
    let m0 = cfg.spec.m0();
    let (l, slopes) = l_slopes(&tower, m, margin)?;
    let np = l.np_q_adic(cfg.spec.a)?;
    let report = if m >= m0 {
        let alphas = if m == m0 { slopes.clone() } else { l_slopes(&tower, m0, margin)?.1 };
        let predicted = predicted_slopes(&alphas, cfg.spec.p, m0, m);
        let mut sorted = slopes.clone();
        sorted.sort();
        let verdict =
            if sorted == predicted { Verdict::Match } else { Verdict::Mismatch("slope multisets differ".into()) };
        Some(SlopeReport { m, slopes: slopes.clone(), predicted, verdict })
    } else {
        None
    };
    match cfg.format {
        Format::Json => {
            let v = with_config(
                cfg,
                json!({
                    "m": m,
                    "m0": m0,
                    "degree": l.degree(),
                    "slopes": slopes_json(&slopes),
                    "polygon": np.to_json(),
                    "report": report.as_ref().map(SlopeReport::to_json),
                }),
            );
            Ok(Output::ok(json_out(v)))
        }
        Format::Csv => match report {
            Some(r) => Ok(Output::ok(slope_report_csv(&[r]))),
            None => Err(Error::InvalidSpec(format!("no slope prediction below m0 = {m0}"))),
        },
        Format::Svg => Ok(Output::ok(render_svg(&format!("L at conductor p^{m}"), &[("q-adic", &np, "#1f77b4")]))),
    }
}

pub fn cmd_zeta(cfg: &RunConfig, m: u32, k_max: usize) -> Result<Output> {
    if m == 0 || k_max == 0 {
        return Err(Error::InvalidSpec("m and k-max must be at least 1".into()));
    }
    let tower = cfg.tower();
    let counts: Vec<u64> = (1..=k_max).map(|k| count_points_trace(&tower, m, k)).collect::<Result<_>>()?;
    let witt: Option<Vec<u64>> = if m <= 2 {
        Some((1..=k_max).map(|k| count_points_witt(&cfg.spec, m, k, cfg.budget)).collect::<Result<_>>()?)
    } else {
        None
    };
    let poly = assemble_p_curve(&tower, m)?;
    verify_zeta(&tower, m, k_max, &counts)?;
    let failure = match &witt {
        Some(w) if *w != counts => Some("Witt-vector point counts differ from the character-sum counts".to_string()),
        _ => None,
    };
    if cfg.format != Format::Json {
        return Err(unsupported(cfg, "zeta"));
    }
    let v = with_config(
        cfg,
        json!({
            "m": m,
            "P": poly.iter().map(asw_core::newton::bigint_json).collect::<Vec<_>>(),
            "degree": poly.len() - 1,
            "two_genus": two_genus(cfg.spec.p, cfg.spec.d(), m),
            "counts": counts,
            "witt_counts": witt,
            "verdict": if failure.is_none() { "match" } else { "mismatch" },
        }),
    );
    Ok(Output { body: json_out(v), failure })
}

pub fn cmd_verify(cfg: &RunConfig, m_max: u32, margin: usize) -> Result<Output> {
    let tower = cfg.tower();
    let reports = verify_periodicity(&tower, m_max, margin)?;
    let bad: Vec<u32> = reports.iter().filter(|r| !r.verdict.is_match()).map(|r| r.m).collect();
    let failure = (!bad.is_empty()).then(|| format!("slope periodicity fails at m = {bad:?}"));
    let body = match cfg.format {
        Format::Json => json_out(with_config(
            cfg,
            json!({
                "m0": cfg.spec.m0(),
                "reports": reports.iter().map(SlopeReport::to_json).collect::<Vec<_>>(),
                "verdict": if bad.is_empty() { "match" } else { "mismatch" },
            }),
        )),
        Format::Csv => slope_report_csv(&reports),
        Format::Svg => return Err(unsupported(cfg, "verify")),
    };
    Ok(Output { body, failure })
}

pub fn cmd_eigencurve(cfg: &RunConfig, components: usize, conductors: &[u32], margin: usize) -> Result<Output> {
    if cfg.format == Format::Svg && conductors.len() != 1 {
        return Err(Error::InvalidSpec("svg output takes exactly one conductor".into()));
    }
    let tower = cfg.tower();
    let family = component_slopes(&tower, margin)?;
    let c = c_star_t(&tower)?;
    let (p, a, d) = (cfg.spec.p, cfg.spec.a, cfg.spec.d());
    let fact = slope_factor(&c, p, a, d, components)?;
    let checks = verify_weight_slope_law(&fact, &family, p, a, conductors)?;
    let disjoint = components_disjoint(&checks);
    let units = fact.factors.iter().all(|f| f.leading_unit);
    let pass = checks.iter().all(|c| c.pass) && disjoint && units;
    let failure = (!pass).then(|| "the weight-slope law does not hold for every component".to_string());
    let body = match cfg.format {
        Format::Json => json_out(with_config(
            cfg,
            json!({
                "family": family.to_json(),
                "factors": fact.factors.iter().map(|f| f.to_json()).collect::<Vec<_>>(),
                "checks": checks.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
                "disjoint": disjoint,
                "verdict": if pass { "match" } else { "mismatch" },
            }),
        )),
        Format::Svg => render_components_svg(&fact, conductors[0])?,
        Format::Csv => return Err(unsupported(cfg, "eigencurve")),
    };
    Ok(Output { body, failure })
}

pub enum CacheAction {
    List,
    Purge,
}

pub fn cmd_cache(dir: Option<std::path::PathBuf>, action: CacheAction) -> Result<Output> {
    let dir = dir.ok_or_else(|| Error::InvalidSpec("no cache directory: set ASW_CACHE_DIR or --cache-dir".into()))?;
    let cache = HistogramCache::new(dir);
    let v = match action {
        CacheAction::List => {
            let entries: Vec<Value> = cache
                .list()?
                .into_iter()
                .map(|e| {
                    json!({
                        "path": e.path.display().to_string(),
                        "p": e.p,
                        "a": e.a,
                        "k": e.k,
                        "N_eff": e.n_eff,
                        "bytes": e.bytes,
                    })
                })
                .collect();
            json!({ "entries": entries })
        }
        CacheAction::Purge => json!({ "removed": cache.purge()? }),
    };
    Ok(Output::ok(json_out(v)))
}
