//! Error norms over the cut subdomains.

use crate::assembly::Discretization;
use crate::error::Result;
use crate::geometry::quadrature::subpolygon_quadrature;
use crate::geometry::Side;
use crate::mesh::{barycentric, Point};
use crate::spaces::FieldPair;

use super::cases::ExactSolution;

/// Quadrature degree for all error integrals.
pub const ERROR_QUADRATURE_DEGREE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorNorms {
    pub p_l2: f64,
    pub u_l2: f64,
    pub u_h1: f64,
    pub u_inf: f64,
    pub p_inf: f64,
}

/// Discrete pressure on side `side` at `x`, which lies in velocity
/// triangle `t`.
fn pressure_at(disc: &Discretization, p: &FieldPair, t: usize, side: Side, x: Point) -> Option<f64> {
    let parent = disc.refinement.parent[t];
    let l = barycentric(&disc.pressure_mesh.points(parent), x);
    p.value_in(parent, side, l).map(|v| v[0])
}

/// Velocity and pressure errors against `exact`.
///
/// Pressures are compared up to the constant that makes the error have
/// zero `μ⁻¹`-weighted mean. The L∞ values cover every dof and every
/// quadrature point.
pub fn compute_errors(
    disc: &Discretization,
    u: &FieldPair,
    p: &FieldPair,
    exact: &ExactSolution,
    mu: [f64; 2],
) -> Result<ErrorNorms> {
    let vmesh = &disc.velocity_mesh;
    // (weight, side, pressure error) at every quadrature point
    let mut samples: Vec<(f64, Side, f64)> = Vec::new();
    let mut u_l2 = 0.0;
    let mut u_h1 = 0.0;
    let mut u_inf: f64 = 0.0;
    for t in 0..vmesh.n_triangles() {
        let ce = disc.velocity_cls.element(t);
        let pts = vmesh.points(t);
        for side in Side::BOTH {
            let poly = &ce.subpolygons[side.index()];
            if poly.is_empty() {
                continue;
            }
            let Some(grad) = u.gradient_in(t, side) else { continue };
            let rule = subpolygon_quadrature(poly, ERROR_QUADRATURE_DEGREE)?;
            for (x, w) in rule.iter() {
                let l = barycentric(&pts, x);
                let uh = u.value_in(t, side, l).expect("active velocity triangle");
                let ue = exact.velocity(side, x);
                let e = [ue[0] - uh[0], ue[1] - uh[1]];
                let ge = exact.gradient(side, x);
                let e2 = e[0] * e[0] + e[1] * e[1];
                u_l2 += w * e2;
                u_inf = u_inf.max(e2.sqrt());
                for c in 0..2 {
                    for d in 0..2 {
                        let g = ge[c][d] - grad[c][d];
                        u_h1 += w * g * g;
                    }
                }
                if let Some(ph) = pressure_at(disc, p, t, side, x) {
                    samples.push((w, side, exact.pressure(side, x) - ph));
                }
            }
        }
    }
    let vd = &u.dofs;
    for side in Side::BOTH {
        for (v, d) in vd.vertex_dof[side.index()].iter().enumerate() {
            if let Some(d) = *d {
                let ue = exact.velocity(side, vd.mesh.vertices[v]);
                let e = [ue[0] - u.coefficients[d], ue[1] - u.coefficients[d + 1]];
                u_inf = u_inf.max((e[0] * e[0] + e[1] * e[1]).sqrt());
            }
        }
    }

    let (num, den) = samples.iter().fold((0.0, 0.0), |(n, d), &(w, side, e)| {
        let m = mu[side.index()];
        (n + w * e / m, d + w / m)
    });
    let shift = if den > 0.0 { num / den } else { 0.0 };
    let mut p_l2 = 0.0;
    let mut p_inf: f64 = 0.0;
    for &(w, _, e) in &samples {
        let e = e - shift;
        p_l2 += w * e * e;
        p_inf = p_inf.max(e.abs());
    }
    let pd = &p.dofs;
    for side in Side::BOTH {
        for (v, d) in pd.vertex_dof[side.index()].iter().enumerate() {
            if let Some(d) = *d {
                let e = exact.pressure(side, pd.mesh.vertices[v]) - p.coefficients[d] - shift;
                p_inf = p_inf.max(e.abs());
            }
        }
    }
    Ok(ErrorNorms {
        p_l2: p_l2.sqrt(),
        u_l2: u_l2.sqrt(),
        u_h1: u_h1.sqrt(),
        u_inf,
        p_inf,
    })
}

/// The constant `c` such that `p_h + c` has the same `μ⁻¹`-weighted mean as
/// the exact pressure.
pub fn pressure_shift(disc: &Discretization, p: &FieldPair, exact: &ExactSolution, mu: [f64; 2]) -> Result<f64> {
    let vmesh = &disc.velocity_mesh;
    let (mut num, mut den) = (0.0, 0.0);
    for t in 0..vmesh.n_triangles() {
        let ce = disc.velocity_cls.element(t);
        for side in Side::BOTH {
            let poly = &ce.subpolygons[side.index()];
            if poly.is_empty() {
                continue;
            }
            let rule = subpolygon_quadrature(poly, ERROR_QUADRATURE_DEGREE)?;
            for (x, w) in rule.iter() {
                if let Some(ph) = pressure_at(disc, p, t, side, x) {
                    let m = mu[side.index()];
                    num += w * (exact.pressure(side, x) - ph) / m;
                    den += w / m;
                }
            }
        }
    }
    Ok(if den > 0.0 { num / den } else { 0.0 })
}
