//! Doubled piecewise-linear spaces: one copy of the P1 space per side, each
//! living on the triangles that reach into that side.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::quadrature::subpolygon_quadrature;
use crate::geometry::{CutClassification, Side};
use crate::mesh::{barycentric, Point, TriMesh};

/// Degree-of-freedom numbering for a doubled P1 field.
///
/// Side-one vertices come first, then side-two vertices, each in ascending
/// vertex order; vector components of a vertex are consecutive.
#[derive(Debug, Clone)]
pub struct DofMap {
    pub components: usize,
    pub mesh: Arc<TriMesh>,
    /// Triangles carrying each side's field.
    pub in_side: [Vec<bool>; 2],
    /// First dof of each (side, vertex), if active.
    pub vertex_dof: [Vec<Option<usize>>; 2],
    pub n_dofs: usize,
}

impl DofMap {
    pub fn new(mesh: Arc<TriMesh>, cls: &CutClassification, components: usize) -> Self {
        let nv = mesh.n_vertices();
        let mut vertex_dof = [vec![None; nv], vec![None; nv]];
        let mut next = 0;
        for side in Side::BOTH {
            let i = side.index();
            let mut active = vec![false; nv];
            for (t, tri) in mesh.triangles.iter().enumerate() {
                if cls.in_side[i][t] {
                    for &v in tri {
                        active[v] = true;
                    }
                }
            }
            for v in 0..nv {
                if active[v] {
                    vertex_dof[i][v] = Some(next);
                    next += components;
                }
            }
        }
        DofMap {
            components,
            mesh,
            in_side: cls.in_side.clone(),
            vertex_dof,
            n_dofs: next,
        }
    }

    pub fn dof(&self, side: Side, vertex: usize, component: usize) -> Option<usize> {
        self.vertex_dof[side.index()][vertex].map(|d| d + component)
    }

    /// Base dofs of the three vertices of triangle `t` on `side`.
    pub fn element_dofs(&self, t: usize, side: Side) -> Option<[usize; 3]> {
        if !self.in_side[side.index()][t] {
            return None;
        }
        let tri = self.mesh.triangles[t];
        let d = &self.vertex_dof[side.index()];
        Some([d[tri[0]]?, d[tri[1]]?, d[tri[2]]?])
    }

    /// Number of dofs belonging to `side`.
    pub fn side_count(&self, side: Side) -> usize {
        self.vertex_dof[side.index()].iter().filter(|d| d.is_some()).count() * self.components
    }

    /// (side, vertex, component) of every dof, in dof order.
    pub fn dof_owners(&self) -> Vec<(Side, usize, usize)> {
        let mut out = vec![(Side::One, 0, 0); self.n_dofs];
        for side in Side::BOTH {
            for (v, d) in self.vertex_dof[side.index()].iter().enumerate() {
                if let Some(d) = d {
                    for c in 0..self.components {
                        out[d + c] = (side, v, c);
                    }
                }
            }
        }
        out
    }
}

pub fn build_pressure_space(mesh: Arc<TriMesh>, cls: &CutClassification) -> DofMap {
    DofMap::new(mesh, cls, 1)
}

pub fn build_velocity_space(mesh: Arc<TriMesh>, cls: &CutClassification) -> DofMap {
    DofMap::new(mesh, cls, 2)
}

/// Coefficients of a doubled field over a [`DofMap`].
#[derive(Debug, Clone)]
pub struct FieldPair {
    pub coefficients: Vec<f64>,
    pub dofs: Arc<DofMap>,
}

impl FieldPair {
    pub fn new(coefficients: Vec<f64>, dofs: Arc<DofMap>) -> Result<Self> {
        if coefficients.len() != dofs.n_dofs {
            return Err(Error::invalid(format!(
                "expected {} coefficients, got {}",
                dofs.n_dofs,
                coefficients.len()
            )));
        }
        Ok(FieldPair { coefficients, dofs })
    }

    /// Nodal interpolant of `f` on each side.
    pub fn interpolate(dofs: Arc<DofMap>, f: impl Fn(Side, Point) -> Vec<f64>) -> Self {
        let mut coefficients = vec![0.0; dofs.n_dofs];
        for side in Side::BOTH {
            for (v, d) in dofs.vertex_dof[side.index()].iter().enumerate() {
                if let Some(d) = d {
                    let val = f(side, dofs.mesh.vertices[v]);
                    coefficients[*d..*d + dofs.components].copy_from_slice(&val[..dofs.components]);
                }
            }
        }
        FieldPair { coefficients, dofs }
    }

    /// Value on `side` of triangle `t` at barycentric coordinates `l`.
    pub fn value_in(&self, t: usize, side: Side, l: [f64; 3]) -> Option<Vec<f64>> {
        let base = self.dofs.element_dofs(t, side)?;
        let nc = self.dofs.components;
        let mut out = vec![0.0; nc];
        for k in 0..3 {
            for (c, o) in out.iter_mut().enumerate() {
                *o += l[k] * self.coefficients[base[k] + c];
            }
        }
        Some(out)
    }

    /// Constant gradient on `side` of triangle `t`; row `c` is `grad` of
    /// component `c`.
    pub fn gradient_in(&self, t: usize, side: Side) -> Option<Vec<[f64; 2]>> {
        let base = self.dofs.element_dofs(t, side)?;
        let g = p1_gradients(&self.dofs.mesh.points(t));
        let nc = self.dofs.components;
        let mut out = vec![[0.0; 2]; nc];
        for k in 0..3 {
            for (c, o) in out.iter_mut().enumerate() {
                let u = self.coefficients[base[k] + c];
                o[0] += u * g[k][0];
                o[1] += u * g[k][1];
            }
        }
        Some(out)
    }
}

/// Gradients of the three barycentric basis functions.
pub fn p1_gradients(p: &[Point; 3]) -> [[f64; 2]; 3] {
    let two_a = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
    [
        [(p[1][1] - p[2][1]) / two_a, (p[2][0] - p[1][0]) / two_a],
        [(p[2][1] - p[0][1]) / two_a, (p[0][0] - p[2][0]) / two_a],
        [(p[0][1] - p[1][1]) / two_a, (p[1][0] - p[0][0]) / two_a],
    ]
}

/// Evaluate the side-`side` part of `field` at `x`.
pub fn evaluate(field: &FieldPair, x: Point, side: Side) -> Result<Vec<f64>> {
    let mesh = &field.dofs.mesh;
    let tol = 1e-12;
    for t in 0..mesh.n_triangles() {
        if !field.dofs.in_side[side.index()][t] {
            continue;
        }
        let l = barycentric(&mesh.points(t), x);
        if l.iter().all(|&v| v >= -tol) {
            return Ok(field.value_in(t, side, l).expect("active triangle"));
        }
    }
    Err(Error::invalid(format!(
        "point ({}, {}) is outside the side-{} extended domain",
        x[0],
        x[1],
        side.index() + 1
    )))
}

/// Row of the mean-value constraint `sum_i mu_i^{-1} (q_i, 1)_{Ω_i} = 0`.
pub fn mean_constraint_vector(dofs: &DofMap, cls: &CutClassification, mu: [f64; 2]) -> Result<Vec<f64>> {
    if dofs.components != 1 {
        return Err(Error::invalid("mean constraint needs a scalar space"));
    }
    let mesh = &dofs.mesh;
    let mut c = vec![0.0; dofs.n_dofs];
    for t in 0..mesh.n_triangles() {
        let ce = cls.element(t);
        let pts = mesh.points(t);
        for side in Side::BOTH {
            let Some(base) = dofs.element_dofs(t, side) else { continue };
            let rule = subpolygon_quadrature(&ce.subpolygons[side.index()], 2)?;
            for (x, w) in rule.iter() {
                let l = barycentric(&pts, x);
                for k in 0..3 {
                    c[base[k]] += w * l[k] / mu[side.index()];
                }
            }
        }
    }
    Ok(c)
}
