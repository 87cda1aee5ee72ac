//! Newton polygons with exact rational coordinates.

use std::fmt::Write as _;

use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::padic::Valuation;

/// Which uniformizer the y-axis is measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// v(q) = 1.
    QAdic,
    /// v(π_χ) = 1.
    PiChi,
    /// v(T^{a(p-1)}) = 1, equivalently v(π_χ^{a(p-1)}) = 1 after specialization.
    TAdic,
    Raw,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonPolygon {
    vertices: Vec<(i64, Rational64)>,
    pub norm: Normalization,
}

fn cross(o: (i64, Rational64), a: (i64, Rational64), b: (i64, Rational64)) -> Rational64 {
    Rational64::from(a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * Rational64::from(b.0 - o.0)
}

/// Lower convex hull of (i, v_i).
///
/// Hull vertices come from `Exact` points only. An `AtLeast(b)` point is
/// accepted when (i, b) is on or above that hull, so the true point cannot
/// lower it; otherwise, or when it lies outside the exact x-range, the
/// result would be a guess and `InsufficientPrecision(i)` is returned.
/// `Infinite` points are zero coefficients and are skipped.
pub fn lower_hull(points: &[(i64, Valuation)], norm: Normalization) -> Result<NewtonPolygon> {
    let mut exact: Vec<(i64, Rational64)> =
        points.iter().filter_map(|&(x, v)| if let Valuation::Exact(y) = v { Some((x, y)) } else { None }).collect();
    exact.sort_by_key(|pt| pt.0);
    if exact.is_empty() {
        return Err(Error::InsufficientPrecision(0));
    }
    let mut hull: Vec<(i64, Rational64)> = Vec::new();
    for pt in exact {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], pt) <= Rational64::zero() {
            hull.pop();
        }
        hull.push(pt);
    }
    let np = NewtonPolygon { vertices: hull, norm };
    for &(x, v) in points {
        if let Valuation::AtLeast(b) = v {
            match np.y_at(Rational64::from(x)) {
                Some(y) if b >= y => {}
                _ => return Err(Error::InsufficientPrecision(x.max(0) as usize)),
            }
        }
    }
    Ok(np)
}

/// Drop trailing points that are not `Exact`, keeping the longest prefix whose
/// last point carries an exact valuation.
pub fn exact_prefix(points: &[(i64, Valuation)]) -> Vec<(i64, Valuation)> {
    let end = points.iter().rposition(|(_, v)| v.is_exact()).map_or(0, |i| i + 1);
    points[..end].to_vec()
}

impl NewtonPolygon {
    /// Polygon starting at (0, 0) with the given width-1 slopes (non-decreasing).
    pub fn from_slopes(slopes: &[Rational64], norm: Normalization) -> Self {
        let mut pts = vec![(0i64, Rational64::zero())];
        let mut y = Rational64::zero();
        for (i, s) in slopes.iter().enumerate() {
            y += s;
            pts.push((i as i64 + 1, y));
        }
        let exact: Vec<_> = pts.into_iter().map(|(x, y)| (x, Valuation::Exact(y))).collect();
        lower_hull(&exact, norm).expect("exact points")
    }

    pub fn vertices(&self) -> &[(i64, Rational64)] {
        &self.vertices
    }

    pub fn x_range(&self) -> (i64, i64) {
        (self.vertices[0].0, self.vertices[self.vertices.len() - 1].0)
    }

    pub fn width(&self) -> i64 {
        let (a, b) = self.x_range();
        b - a
    }

    /// Width-1 slopes in increasing order.
    pub fn slopes(&self) -> Vec<Rational64> {
        let mut out = Vec::new();
        for w in self.vertices.windows(2) {
            let dx = w[1].0 - w[0].0;
            let s = (w[1].1 - w[0].1) / Rational64::from(dx);
            out.extend(std::iter::repeat_n(s, dx as usize));
        }
        out
    }

    /// Height of the polygon at x, if x lies in its range.
    pub fn y_at(&self, x: Rational64) -> Option<Rational64> {
        let (a, b) = self.x_range();
        if x < Rational64::from(a) || x > Rational64::from(b) {
            return None;
        }
        if self.vertices.len() == 1 {
            return Some(self.vertices[0].1);
        }
        for w in self.vertices.windows(2) {
            let (x0, x1) = (Rational64::from(w[0].0), Rational64::from(w[1].0));
            if x >= x0 && x <= x1 {
                return Some(w[0].1 + (w[1].1 - w[0].1) * (x - x0) / (x1 - x0));
            }
        }
        None
    }

    pub fn y_at_int(&self, x: i64) -> Option<Rational64> {
        self.y_at(Rational64::from(x))
    }

    pub fn is_vertex(&self, x: i64) -> bool {
        self.vertices.iter().any(|v| v.0 == x)
    }

    /// Multiply all heights by `factor` (> 0).
    pub fn rescale(&self, factor: Rational64, norm: Normalization) -> Self {
        assert!(factor.is_positive());
        NewtonPolygon { vertices: self.vertices.iter().map(|&(x, y)| (x, y * factor)).collect(), norm }
    }

    /// Restrict to x <= x_max; the cut point becomes a vertex.
    pub fn restrict(&self, x_max: i64) -> Self {
        let (a, b) = self.x_range();
        let x_max = x_max.clamp(a, b);
        let mut pts: Vec<_> = self.vertices.iter().copied().filter(|v| v.0 <= x_max).collect();
        if pts.last().map(|v| v.0) != Some(x_max) {
            pts.push((x_max, self.y_at_int(x_max).unwrap()));
        }
        let exact: Vec<_> = pts.into_iter().map(|(x, y)| (x, Valuation::Exact(y))).collect();
        lower_hull(&exact, self.norm).unwrap()
    }

    /// True when self is on or above `other` at every integer in both ranges.
    pub fn lies_above(&self, other: &NewtonPolygon) -> bool {
        self.compare_int(other, |a, b| a >= b)
    }

    pub fn lies_below(&self, other: &NewtonPolygon) -> bool {
        self.compare_int(other, |a, b| a <= b)
    }

    fn compare_int(&self, other: &NewtonPolygon, ok: impl Fn(Rational64, Rational64) -> bool) -> bool {
        let (a0, b0) = self.x_range();
        let (a1, b1) = other.x_range();
        (a0.max(a1)..=b0.min(b1)).all(|x| ok(self.y_at_int(x).unwrap(), other.y_at_int(x).unwrap()))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "normalization": self.norm,
            "vertices": self.vertices.iter().map(|(x, y)| json!([x, y.numer(), y.denom()])).collect::<Vec<_>>(),
            "slopes": self.slopes().iter().map(rational_json).collect::<Vec<_>>(),
        })
    }
}

pub fn rational_json(r: &Rational64) -> Value {
    json!([r.numer(), r.denom()])
}

/// An integer as a JSON number when it fits in i64, otherwise as a decimal string.
pub fn bigint_json(x: &num_bigint::BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

/// Polygon with vertices (k, k(k-1)/(2d)), k = 0..=K.
pub fn hodge_polygon(d: u64, k_max: usize) -> NewtonPolygon {
    let slopes: Vec<Rational64> = (0..k_max).map(|k| Rational64::new(k as i64, d as i64)).collect();
    NewtonPolygon::from_slopes(&slopes, Normalization::TAdic)
}

/// Width-1 slopes of the upper bound: per block n, one slope n then d-1 of slope n + 1/2.
pub fn upper_bound_slopes(d: u64, k_max: usize) -> Vec<Rational64> {
    (0..k_max)
        .map(|k| {
            let (n, r) = (k as i64 / d as i64, k as i64 % d as i64);
            if r == 0 {
                Rational64::from(n)
            } else {
                Rational64::from(n) + Rational64::new(1, 2)
            }
        })
        .collect()
}

pub fn upper_bound_polygon(d: u64, k_max: usize) -> NewtonPolygon {
    NewtonPolygon::from_slopes(&upper_bound_slopes(d, k_max), Normalization::TAdic)
}

/// Maximum of upper - k(k-1)/(2d) over real x, and the offset within a block
/// where it is attained. The difference is the same parabola
/// (t-1)/2 - t(t-1)/(2d) in every block, maximal at t = (d+1)/2.
pub fn max_gap(d: u64) -> (Rational64, Rational64) {
    let d = d as i64;
    let t = Rational64::new(d + 1, 2);
    let g = (t - 1) / 2 - t * (t - 1) / (2 * d);
    (g, t)
}

/// Maximum gap between the two polygons at integer abscissae only.
pub fn max_gap_integral(d: u64) -> Rational64 {
    let up = upper_bound_polygon(d, d as usize);
    let ho = hodge_polygon(d, d as usize);
    (0..=d as i64).map(|x| up.y_at_int(x).unwrap() - ho.y_at_int(x).unwrap()).max().unwrap()
}

/// Standalone SVG drawing of several polygons on shared axes.
pub fn render_svg(title: &str, layers: &[(&str, &NewtonPolygon, &str)]) -> String {
    let (w, h, m) = (640.0_f64, 480.0_f64, 50.0_f64);
    let x_max = layers.iter().map(|l| l.1.x_range().1).max().unwrap_or(1).max(1) as f64;
    let y_max =
        layers.iter().flat_map(|l| l.1.vertices().iter().map(|v| v.1.to_f64().unwrap_or(0.0))).fold(1e-9_f64, f64::max);
    let sx = |x: f64| m + x / x_max * (w - 2.0 * m);
    let sy = |y: f64| h - m - y / y_max * (h - 2.0 * m);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" font-family="sans-serif" font-size="14">{}</text>"#, m, escape(title));
    let _ = writeln!(
        s,
        r#"<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="black"/><line x1="{0}" y1="{1}" x2="{0}" y2="{3}" stroke="black"/>"#,
        sx(0.0),
        sy(0.0),
        sx(x_max),
        sy(y_max)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11">{}</text>"#,
        sx(x_max) - 10.0,
        sy(0.0) + 16.0,
        x_max
    );
    let _ = writeln!(
        s,
        r#"<text x="4" y="{}" font-family="sans-serif" font-size="11">{:.3}</text>"#,
        sy(y_max) + 4.0,
        y_max
    );
    for (i, (label, np, color)) in layers.iter().enumerate() {
        let pts: Vec<String> = np
            .vertices()
            .iter()
            .map(|(x, y)| format!("{:.2},{:.2}", sx(*x as f64), sy(y.to_f64().unwrap_or(0.0))))
            .collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#, pts.join(" "));
        for (x, y) in np.vertices() {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                sx(*x as f64),
                sy(y.to_f64().unwrap_or(0.0))
            );
        }
        let ly = 44.0 + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{ly}" font-family="sans-serif" font-size="12" fill="{color}">{}</text>"#,
            w - 200.0,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Multiset equality of two slope lists.
pub fn same_slopes(a: &[Rational64], b: &[Rational64]) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort();
    b.sort();
    a == b
}
