//! Quadrature on triangles, polygons and segments.

use crate::error::{Error, Result};
use crate::mesh::{dist, lerp, signed_area, Point};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate(&self, f: impl Fn(Point) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Point, f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }

    fn append(&mut self, other: QuadratureRule) {
        self.points.extend(other.points);
        self.weights.extend(other.weights);
    }
}

// Symmetric rules on the reference triangle as (barycentric orbit, weight);
// weights sum to one. Orbits: centroid, (a, a, 1-2a), and (a, b, 1-a-b).
enum Orbit {
    Centroid(f64),
    Two(f64, f64),
    Six(f64, f64, f64),
}

fn orbits(degree: usize) -> (usize, Vec<Orbit>) {
    use Orbit::*;
    match degree {
        0 | 1 => (1, vec![Centroid(1.0)]),
        2 => (2, vec![Two(1.0 / 6.0, 1.0 / 3.0)]),
        3 | 4 => (
            4,
            vec![
                Two(0.445948490915965, 0.223381589678011),
                Two(0.091576213509771, 0.109951743655322),
            ],
        ),
        5 => (
            5,
            vec![
                Centroid(0.225),
                Two(0.470142064105115, 0.132394152788506),
                Two(0.101286507323456, 0.125939180544827),
            ],
        ),
        _ => (
            8,
            vec![
                Centroid(0.144315607677787),
                Two(0.459292588292723, 0.095091634267285),
                Two(0.170569307751760, 0.103217370534718),
                Two(0.050547228317031, 0.032458497623198),
                Six(0.263112829634638, 0.008394777409958, 0.027230314174435),
            ],
        ),
    }
}

/// Barycentric points and weights (summing to one) of a rule exact for
/// polynomials of the requested degree (at most 8).
pub fn reference_triangle_rule(degree: usize) -> Result<Vec<([f64; 3], f64)>> {
    if degree > 8 {
        return Err(Error::invalid(format!(
            "triangle rules go up to degree 8, asked for {degree}"
        )));
    }
    let (_, orbs) = orbits(degree);
    let mut out = Vec::new();
    for orb in orbs {
        match orb {
            Orbit::Centroid(w) => out.push(([1.0 / 3.0; 3], w)),
            Orbit::Two(a, w) => {
                let b = 1.0 - 2.0 * a;
                out.push(([a, a, b], w));
                out.push(([a, b, a], w));
                out.push(([b, a, a], w));
            }
            Orbit::Six(a, b, w) => {
                let c = 1.0 - a - b;
                for l in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
                    out.push((l, w));
                }
            }
        }
    }
    Ok(out)
}

/// Rule on a physical triangle; weights scale with its (unsigned) area.
pub fn triangle_rule(p: &[Point; 3], degree: usize) -> Result<QuadratureRule> {
    let area = signed_area(p[0], p[1], p[2]).abs();
    let mut rule = QuadratureRule::default();
    for (l, w) in reference_triangle_rule(degree)? {
        rule.points.push([
            l[0] * p[0][0] + l[1] * p[1][0] + l[2] * p[2][0],
            l[0] * p[0][1] + l[1] * p[1][1] + l[2] * p[2][1],
        ]);
        rule.weights.push(w * area);
    }
    Ok(rule)
}

/// Area of a simple polygon (shoelace, positive for counter-clockwise).
pub fn polygon_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for k in 0..n {
        let a = poly[k];
        let b = poly[(k + 1) % n];
        s += a[0] * b[1] - a[1] * b[0];
    }
    0.5 * s
}

fn polygon_diameter(poly: &[Point]) -> f64 {
    let mut d = 0.0f64;
    for (i, &a) in poly.iter().enumerate() {
        for &b in &poly[i + 1..] {
            d = d.max(dist(a, b));
        }
    }
    d
}

/// Rule on a convex polygon, fan-triangulated from its vertex average.
///
/// Degenerate polygons (area below `1e-14 * diam^2`) give an empty rule.
pub fn subpolygon_quadrature(poly: &[Point], degree: usize) -> Result<QuadratureRule> {
    let area = polygon_area(poly);
    let diam = polygon_diameter(poly);
    if poly.len() < 3 || area.abs() <= 1e-14 * diam * diam {
        return Ok(QuadratureRule::default());
    }
    let n = poly.len() as f64;
    let c = [
        poly.iter().map(|p| p[0]).sum::<f64>() / n,
        poly.iter().map(|p| p[1]).sum::<f64>() / n,
    ];
    let mut rule = QuadratureRule::default();
    for k in 0..poly.len() {
        let tri = [c, poly[k], poly[(k + 1) % poly.len()]];
        if signed_area(tri[0], tri[1], tri[2]).abs() <= 1e-14 * area.abs() {
            continue;
        }
        rule.append(triangle_rule(&tri, degree)?);
    }
    Ok(rule)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(z) and P_n'(z)
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Gauss rule with `n` points on the segment `a -> b`.
pub fn segment_rule(a: Point, b: Point, n: usize) -> QuadratureRule {
    let len = dist(a, b);
    let (x, w) = gauss_legendre(n);
    QuadratureRule {
        points: x.iter().map(|&s| lerp(a, b, 0.5 * (s + 1.0))).collect(),
        weights: w.iter().map(|&wi| 0.5 * len * wi).collect(),
    }
}

/// Rule on an interface segment exact to the given polynomial degree.
pub fn interface_quadrature(segment: [Point; 2], degree: usize) -> QuadratureRule {
    segment_rule(segment[0], segment[1], degree.div_ceil(2).max(1))
}

/// Split a boundary face at the exact zero of `phi` and return the rules for
/// the parts in side 1 (`phi < 0`) and side 2 (`phi > 0`).
pub fn boundary_quadrature(
    a: Point,
    b: Point,
    phi: &crate::geometry::LevelSet,
    degree: usize,
) -> (QuadratureRule, QuadratureRule) {
    let n = degree.div_ceil(2).max(1);
    let len = dist(a, b);
    let tol = crate::geometry::SNAP_TOLERANCE * len;
    let snap = |v: f64| if v.abs() < tol { 0.0 } else { v };
    let (fa, fb) = (snap(phi.value(a)), snap(phi.value(b)));
    let empty = QuadratureRule::default;
    if fa * fb < 0.0 {
        let t = phi.edge_root(a, b).unwrap_or(fa / (fa - fb));
        let q = lerp(a, b, t);
        let (ra, rb) = (segment_rule(a, q, n), segment_rule(q, b, n));
        return if fa < 0.0 { (ra, rb) } else { (rb, ra) };
    }
    let side_one = if fa == 0.0 && fb == 0.0 {
        phi.value(lerp(a, b, 0.5)) <= 0.0
    } else {
        fa + fb < 0.0
    };
    let whole = segment_rule(a, b, n);
    if side_one {
        (whole, empty())
    } else {
        (empty(), whole)
    }
}
