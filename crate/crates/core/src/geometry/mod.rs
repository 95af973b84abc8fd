//! Level-set interfaces and their intersection with mesh triangles.

mod classify;
pub mod quadrature;

pub use classify::{check_assumptions, classify, AssumptionReport, CutClassification, InterfaceSegment, Violation};

use crate::error::{Error, Result};
use crate::mesh::{diameter, dot, lerp, norm, signed_area, sub, Point};
use quadrature::polygon_area;

/// Vertex values with `|phi| < SNAP_TOLERANCE * h` are treated as zero.
pub const SNAP_TOLERANCE: f64 = 1e-10;

/// Which subdomain: `One` is `phi < 0`, `Two` is `phi > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    One,
    Two,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::One, Side::Two];

    pub fn index(self) -> usize {
        match self {
            Side::One => 0,
            Side::Two => 1,
        }
    }

    pub fn other(self) -> Side {
        match self {
            Side::One => Side::Two,
            Side::Two => Side::One,
        }
    }
}

/// Interface description. Inside of the circle (left of / below the line)
/// is side one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LevelSet {
    Circle { center: Point, radius: f64 },
    VerticalLine { x: f64 },
    HorizontalLine { y: f64 },
}

impl LevelSet {
    pub fn value(&self, p: Point) -> f64 {
        match *self {
            LevelSet::Circle { center, radius } => norm(sub(p, center)) - radius,
            LevelSet::VerticalLine { x } => p[0] - x,
            LevelSet::HorizontalLine { y } => p[1] - y,
        }
    }

    /// Unit normal `grad phi / |grad phi|`, pointing from side one to side two.
    pub fn normal(&self, p: Point) -> Point {
        match *self {
            LevelSet::Circle { center, .. } => {
                let d = sub(p, center);
                let r = norm(d);
                if r == 0.0 {
                    [1.0, 0.0]
                } else {
                    [d[0] / r, d[1] / r]
                }
            }
            LevelSet::VerticalLine { .. } => [1.0, 0.0],
            LevelSet::HorizontalLine { .. } => [0.0, 1.0],
        }
    }

    /// Curvature `div n` of the level set through `p`.
    pub fn curvature(&self, p: Point) -> f64 {
        match *self {
            LevelSet::Circle { center, .. } => 1.0 / norm(sub(p, center)),
            _ => 0.0,
        }
    }

    /// Parameters `t` in `[0, 1]` where `phi(a + t (b - a)) = 0`, ascending.
    /// Tangential touches are reported once.
    pub fn roots_on_segment(&self, a: Point, b: Point) -> Vec<f64> {
        let in_range = |t: f64| (-1e-14..=1.0 + 1e-14).contains(&t);
        match *self {
            LevelSet::Circle { center, radius } => {
                let d = sub(b, a);
                let e = sub(a, center);
                let qa = dot(d, d);
                let qb = 2.0 * dot(e, d);
                let qc = dot(e, e) - radius * radius;
                let disc = qb * qb - 4.0 * qa * qc;
                if disc < 0.0 || qa == 0.0 {
                    return Vec::new();
                }
                let sq = disc.sqrt();
                // stable pair of roots
                let q = -0.5 * (qb + qb.signum() * sq);
                let mut roots = if q == 0.0 {
                    vec![0.0]
                } else {
                    vec![q / qa, qc / q]
                };
                roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
                roots.dedup();
                roots.into_iter().filter(|&t| in_range(t)).map(|t| t.clamp(0.0, 1.0)).collect()
            }
            _ => {
                let (fa, fb) = (self.value(a), self.value(b));
                if fa == fb {
                    return Vec::new();
                }
                let t = fa / (fa - fb);
                if in_range(t) {
                    vec![t.clamp(0.0, 1.0)]
                } else {
                    Vec::new()
                }
            }
        }
    }

    /// The crossing of an edge whose end values have opposite signs.
    pub fn edge_root(&self, a: Point, b: Point) -> Option<f64> {
        let (fa, fb) = (self.value(a), self.value(b));
        if fa * fb > 0.0 {
            return None;
        }
        let roots = self.roots_on_segment(a, b);
        let linear = fa / (fa - fb);
        roots
            .into_iter()
            .min_by(|x, y| (x - linear).abs().partial_cmp(&(y - linear).abs()).unwrap())
            .or(Some(linear))
    }

    /// True when the interface enters and leaves the open segment `a -> b`
    /// with both end values on the same side.
    pub fn crosses_twice(&self, a: Point, b: Point) -> bool {
        if let LevelSet::Circle { center, radius } = *self {
            let (fa, fb) = (self.value(a), self.value(b));
            if fa * fb <= 0.0 {
                return false;
            }
            let d = sub(b, a);
            let e = sub(a, center);
            let qa = dot(d, d);
            let qb = 2.0 * dot(e, d);
            let qc = dot(e, e) - radius * radius;
            let disc = qb * qb - 4.0 * qa * qc;
            if disc <= 0.0 {
                return false;
            }
            let t0 = (-qb - disc.sqrt()) / (2.0 * qa);
            let t1 = (-qb + disc.sqrt()) / (2.0 * qa);
            return t0 > 0.0 && t1 < 1.0;
        }
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutCase {
    /// All vertices on one side (single touching vertices allowed).
    Interior(Side),
    /// Interface crosses the interior of the triangle.
    Cut,
    /// Local edge `edge` lies on the interface; the rest of the triangle is
    /// on `side`.
    EdgeAligned { side: Side, edge: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutElement {
    pub case: CutCase,
    /// Interface chord, oriented so that rotating `b - a` clockwise gives
    /// the normal into side two.
    pub segment: Option<[Point; 2]>,
    pub segment_normal: Option<Point>,
    /// Counter-clockwise sub-polygons `K ∩ Ω_1`, `K ∩ Ω_2`.
    pub subpolygons: [Vec<Point>; 2],
    /// `|K ∩ Ω_i| / h_K^2`.
    pub alpha: [f64; 2],
    /// `|Γ ∩ K| / h_K`.
    pub gamma: f64,
    /// `|∂Ω ∩ K| / h_K`, filled in by [`classify`].
    pub gamma_boundary: f64,
    pub area: f64,
    pub h: f64,
}

impl CutElement {
    pub fn is_cut(&self) -> bool {
        matches!(self.case, CutCase::Cut)
    }

    pub fn on_interface(&self) -> bool {
        !matches!(self.case, CutCase::Interior(_))
    }

    /// Whether the triangle has a positive-area part in side `i`.
    pub fn touches(&self, side: Side) -> bool {
        match self.case {
            CutCase::Interior(s) => s == side,
            CutCase::Cut => true,
            CutCase::EdgeAligned { side: s, .. } => s == side,
        }
    }

    pub fn interface_length(&self) -> f64 {
        self.gamma * self.h
    }
}

/// Intersect a counter-clockwise triangle with the interface.
///
/// Vertex values are snapped to zero below `snap_tol * h_K`.
pub fn intersect_triangle(p: &[Point; 3], phi: &LevelSet, snap_tol: f64) -> Result<CutElement> {
    let h = diameter(p);
    let values = p.map(|x| {
        let v = phi.value(x);
        if v.abs() < snap_tol * h {
            0.0
        } else {
            v
        }
    });
    cut_with_values(p, values, phi, None)
}

/// Cut a triangle given already snapped vertex values.
pub(crate) fn cut_with_values(
    p: &[Point; 3],
    s: [f64; 3],
    phi: &LevelSet,
    element: Option<usize>,
) -> Result<CutElement> {
    let h = diameter(p);
    let area = signed_area(p[0], p[1], p[2]);
    if area <= 0.0 {
        return Err(Error::invalid("triangle must be counter-clockwise"));
    }
    let n_neg = s.iter().filter(|&&v| v < 0.0).count();
    let n_pos = s.iter().filter(|&&v| v > 0.0).count();
    let n_zero = 3 - n_neg - n_pos;
    if n_zero == 3 {
        return Err(Error::assumption(
            "all three vertices lie on the interface",
            element,
        ));
    }
    let whole = p.to_vec();
    if n_neg == 0 || n_pos == 0 {
        let side = if n_pos == 0 { Side::One } else { Side::Two };
        let mut subpolygons = [Vec::new(), Vec::new()];
        subpolygons[side.index()] = whole;
        let mut alpha = [0.0; 2];
        alpha[side.index()] = area / (h * h);
        if n_zero == 2 {
            let edge = (0..3)
                .find(|&k| s[k] == 0.0 && s[(k + 1) % 3] == 0.0)
                .expect("two zero vertices share an edge");
            let (a, b) = (p[edge], p[(edge + 1) % 3]);
            // CCW triangle: the interior is to the left of a -> b.
            let (a, b) = match side {
                Side::Two => (b, a),
                Side::One => (a, b),
            };
            let seg_normal = unit_right_normal(a, b);
            let len = crate::mesh::dist(a, b);
            return Ok(CutElement {
                case: CutCase::EdgeAligned { side, edge },
                segment: Some([a, b]),
                segment_normal: Some(seg_normal),
                subpolygons,
                alpha,
                gamma: len / h,
                gamma_boundary: 0.0,
                area,
                h,
            });
        }
        return Ok(CutElement {
            case: CutCase::Interior(side),
            segment: None,
            segment_normal: None,
            subpolygons,
            alpha,
            gamma: 0.0,
            gamma_boundary: 0.0,
            area,
            h,
        });
    }

    let mut polys: [Vec<Point>; 2] = [Vec::new(), Vec::new()];
    let mut crossings: Vec<Point> = Vec::with_capacity(2);
    for k in 0..3 {
        let (a, b) = (p[k], p[(k + 1) % 3]);
        let (fa, fb) = (s[k], s[(k + 1) % 3]);
        if fa < 0.0 {
            polys[0].push(a);
        } else if fa > 0.0 {
            polys[1].push(a);
        } else {
            polys[0].push(a);
            polys[1].push(a);
            crossings.push(a);
        }
        if fa * fb < 0.0 {
            let t = phi.edge_root(a, b).unwrap_or(fa / (fa - fb));
            let t = t.clamp(0.0, 1.0);
            let q = lerp(a, b, t);
            polys[0].push(q);
            polys[1].push(q);
            crossings.push(q);
        }
    }
    if crossings.len() != 2 {
        return Err(Error::assumption(
            format!("interface meets the triangle in {} points", crossings.len()),
            element,
        ));
    }
    let (mut a, mut b) = (crossings[0], crossings[1]);
    let mut seg_normal = unit_right_normal(a, b);
    // orient towards a side-two vertex
    let probe = (0..3).find(|&k| s[k] > 0.0).map(|k| p[k]).expect("has a positive vertex");
    if dot(seg_normal, sub(probe, a)) < 0.0 {
        std::mem::swap(&mut a, &mut b);
        seg_normal = [-seg_normal[0], -seg_normal[1]];
    }
    let a1 = polygon_area(&polys[0]);
    let a2 = polygon_area(&polys[1]);
    let len = crate::mesh::dist(a, b);
    Ok(CutElement {
        case: CutCase::Cut,
        segment: Some([a, b]),
        segment_normal: Some(seg_normal),
        subpolygons: polys,
        alpha: [a1 / (h * h), a2 / (h * h)],
        gamma: len / h,
        gamma_boundary: 0.0,
        area,
        h,
    })
}

fn unit_right_normal(a: Point, b: Point) -> Point {
    let t = sub(b, a);
    let l = norm(t);
    [t[1] / l, -t[0] / l]
}
