//! Element, interface and boundary contributions.

use super::weights::PenaltyParams;
use super::{BForm, CurvatureMode, Discretization, InterfaceNormal, ProblemConfig};
use crate::error::{Error, Result};
use crate::geometry::quadrature::{boundary_quadrature, interface_quadrature, subpolygon_quadrature};
use crate::geometry::Side;
use crate::mesh::{barycentric, dot, Point};
use crate::spaces::{p1_gradients, DofMap};
use crate::sparse::TripletBuilder;

pub(crate) type Tensor = [[f64; 2]; 2];

#[inline]
pub(crate) fn contract(a: &Tensor, b: &Tensor) -> f64 {
    a[0][0] * b[0][0] + a[0][1] * b[0][1] + a[1][0] * b[1][0] + a[1][1] * b[1][1]
}

#[inline]
pub(crate) fn apply(a: &Tensor, n: Point) -> Point {
    [a[0][0] * n[0] + a[0][1] * n[1], a[1][0] * n[0] + a[1][1] * n[1]]
}

/// Vector P1 basis of one side on one triangle: function `j` is
/// `λ_{j/2} e_{j%2}`.
#[derive(Debug, Clone)]
pub(crate) struct VelocityBasis {
    pub dofs: [usize; 6],
    pub grads: [[f64; 2]; 3],
    pub pts: [Point; 3],
}

impl VelocityBasis {
    pub fn new(dofs: &DofMap, t: usize, side: Side) -> Option<Self> {
        let base = dofs.element_dofs(t, side)?;
        let pts = dofs.mesh.points(t);
        let mut d = [0; 6];
        for k in 0..3 {
            d[2 * k] = base[k];
            d[2 * k + 1] = base[k] + 1;
        }
        Some(VelocityBasis {
            dofs: d,
            grads: p1_gradients(&pts),
            pts,
        })
    }

    pub fn values(&self, x: Point) -> [Point; 6] {
        let l = barycentric(&self.pts, x);
        let mut out = [[0.0; 2]; 6];
        for j in 0..6 {
            out[j][j % 2] = l[j / 2];
        }
        out
    }

    pub fn strain(&self, j: usize) -> Tensor {
        let g = self.grads[j / 2];
        let c = j % 2;
        let mut e = [[0.0; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                let da = if a == c { g[b] } else { 0.0 };
                let db = if b == c { g[a] } else { 0.0 };
                e[a][b] = 0.5 * (da + db);
            }
        }
        e
    }

    pub fn divergence(&self, j: usize) -> f64 {
        self.grads[j / 2][j % 2]
    }
}

/// Scalar P1 basis of one side on one (pressure) triangle, with global
/// row offset applied.
#[derive(Debug, Clone)]
pub(crate) struct PressureBasis {
    pub dofs: [usize; 3],
    pub grads: [[f64; 2]; 3],
    pub pts: [Point; 3],
}

impl PressureBasis {
    pub fn new(dofs: &DofMap, t: usize, side: Side, offset: usize) -> Option<Self> {
        let base = dofs.element_dofs(t, side)?;
        let pts = dofs.mesh.points(t);
        Some(PressureBasis {
            dofs: base.map(|d| d + offset),
            grads: p1_gradients(&pts),
            pts,
        })
    }

    pub fn values(&self, x: Point) -> [f64; 3] {
        barycentric(&self.pts, x)
    }
}

pub(crate) struct Forms<'a> {
    pub disc: &'a Discretization,
    pub cfg: &'a ProblemConfig,
    pub params: &'a PenaltyParams,
    pub p_offset: usize,
}

fn missing(what: &str, t: usize) -> Error {
    Error::Solver(format!("internal: no {what} degrees of freedom on triangle {t}"))
}

impl<'a> Forms<'a> {
    pub fn new(disc: &'a Discretization, cfg: &'a ProblemConfig, params: &'a PenaltyParams) -> Self {
        Forms {
            disc,
            cfg,
            params,
            p_offset: disc.n_u(),
        }
    }

    fn pressure_basis(&self, velocity_triangle: usize, side: Side) -> Result<PressureBasis> {
        let parent = self.disc.refinement.parent[velocity_triangle];
        PressureBasis::new(&self.disc.pressure_dofs, parent, side, self.p_offset)
            .ok_or_else(|| missing("pressure", parent))
    }

    /// Push `val` as `b_h(w_j, q_m)` and its mirrored `-b_h` entry.
    #[inline]
    fn push_b(mat: &mut TripletBuilder, q: usize, w: usize, val: f64) {
        mat.push(q, w, val);
        mat.push(w, q, -val);
    }

    /// Viscous volume terms, volume part of `b_h` and the body force.
    pub fn bulk(&self, mat: &mut TripletBuilder, rhs: &mut [f64]) -> Result<()> {
        let disc = self.disc;
        let mesh = &disc.velocity_mesh;
        for t in 0..mesh.n_triangles() {
            let ce = disc.velocity_cls.element(t);
            for side in Side::BOTH {
                let poly = &ce.subpolygons[side.index()];
                if poly.is_empty() {
                    continue;
                }
                let rule = subpolygon_quadrature(poly, 2)?;
                if rule.is_empty() {
                    continue;
                }
                let vb = VelocityBasis::new(&disc.velocity_dofs, t, side).ok_or_else(|| missing("velocity", t))?;
                let pb = self.pressure_basis(t, side)?;
                let mu = self.cfg.mu[side.index()];
                let area = rule.measure();
                let strains: Vec<_> = (0..6).map(|j| vb.strain(j)).collect();
                for a in 0..6 {
                    for b in 0..6 {
                        mat.push(vb.dofs[b], vb.dofs[a], mu * area * contract(&strains[a], &strains[b]));
                    }
                }
                for (x, w) in rule.iter() {
                    let phi = vb.values(x);
                    let chi = pb.values(x);
                    for m in 0..3 {
                        for j in 0..6 {
                            let val = match self.cfg.b_form {
                                BForm::Gradient => -w * dot(phi[j], pb.grads[m]),
                                BForm::Divergence => w * vb.divergence(j) * chi[m],
                            };
                            Self::push_b(mat, pb.dofs[m], vb.dofs[j], val);
                        }
                    }
                }
                let frule = subpolygon_quadrature(poly, 4)?;
                for (x, w) in frule.iter() {
                    let f = self.cfg.data.body_force(side, x);
                    let phi = vb.values(x);
                    for j in 0..6 {
                        rhs[vb.dofs[j]] += w * dot(f, phi[j]);
                    }
                }
            }
        }
        Ok(())
    }

    /// Nitsche coupling, interface part of `b_h` and surface tension.
    pub fn interface(&self, mat: &mut TripletBuilder, rhs: &mut [f64]) -> Result<()> {
        let disc = self.disc;
        let cfg = self.cfg;
        let [mu1, mu2] = cfg.mu;
        for (s, seg) in disc.velocity_cls.interface.iter().enumerate() {
            let (kappa, lambda) = self.params.interface[s];
            let [k1, k2] = kappa;
            let [e1, e2] = seg.elements;
            let vb1 = VelocityBasis::new(&disc.velocity_dofs, e1, Side::One).ok_or_else(|| missing("velocity", e1))?;
            let vb2 = VelocityBasis::new(&disc.velocity_dofs, e2, Side::Two).ok_or_else(|| missing("velocity", e2))?;
            let pb1 = self.pressure_basis(e1, Side::One)?;
            let pb2 = self.pressure_basis(e2, Side::Two)?;
            let st1: Vec<_> = (0..6).map(|j| vb1.strain(j)).collect();
            let st2: Vec<_> = (0..6).map(|j| vb2.strain(j)).collect();
            let rule = interface_quadrature(seg.points, 5);
            for (x, w) in rule.iter() {
                let n = match cfg.normal {
                    InterfaceNormal::LevelSet => disc.levelset.normal(x),
                    InterfaceNormal::Chord => seg.normal,
                };
                // velocity functions: (dof, jump, averaged flux, skew normal average)
                let mut vel: Vec<(usize, Point, Point, f64)> = Vec::with_capacity(12);
                let phi1 = vb1.values(x);
                for j in 0..6 {
                    let t = apply(&st1[j], n);
                    vel.push((vb1.dofs[j], phi1[j], [k1 * mu1 * t[0], k1 * mu1 * t[1]], k2 * dot(phi1[j], n)));
                }
                let phi2 = vb2.values(x);
                for j in 0..6 {
                    let t = apply(&st2[j], n);
                    vel.push((
                        vb2.dofs[j],
                        [-phi2[j][0], -phi2[j][1]],
                        [k2 * mu2 * t[0], k2 * mu2 * t[1]],
                        k1 * dot(phi2[j], n),
                    ));
                }
                for &(da, ja, fa, _) in &vel {
                    for &(db, jb, fb, _) in &vel {
                        let val = -dot(fa, jb) - dot(ja, fb) + lambda * dot(ja, jb);
                        mat.push(db, da, w * val);
                    }
                }
                // pressure functions: (dof, jump, weighted average)
                let mut pres: Vec<(usize, f64, f64)> = Vec::with_capacity(6);
                let chi1 = pb1.values(x);
                for m in 0..3 {
                    pres.push((pb1.dofs[m], chi1[m], k1 * chi1[m]));
                }
                let chi2 = pb2.values(x);
                for m in 0..3 {
                    pres.push((pb2.dofs[m], -chi2[m], k2 * chi2[m]));
                }
                for &(dq, jq, aq) in &pres {
                    for &(dw, jw, _, sw) in &vel {
                        let val = match cfg.b_form {
                            BForm::Gradient => w * jq * sw,
                            BForm::Divergence => -w * dot(jw, n) * aq,
                        };
                        Self::push_b(mat, dq, dw, val);
                    }
                }
                if cfg.sigma != 0.0 {
                    let curvature = match cfg.curvature {
                        CurvatureMode::Exact => disc.levelset.curvature(x),
                        CurvatureMode::Constant(c) => c,
                    };
                    for &(dv, _, _, sv) in &vel {
                        rhs[dv] += w * cfg.sigma * curvature * sv;
                    }
                }
            }
        }
        Ok(())
    }

    /// Nitsche boundary terms, boundary part of `b_h` and Dirichlet data.
    pub fn boundary(&self, mat: &mut TripletBuilder, rhs: &mut [f64]) -> Result<()> {
        let disc = self.disc;
        let cfg = self.cfg;
        let mesh = &disc.velocity_mesh;
        for (f, face) in mesh.faces.iter().enumerate() {
            if !face.is_boundary() {
                continue;
            }
            let t = face.elements.0;
            let n = mesh.face_normal(f);
            let a = mesh.vertices[face.vertices[0]];
            let b = mesh.vertices[face.vertices[1]];
            let rules = boundary_quadrature(a, b, &disc.levelset, 5);
            let lam = self.params.boundary.get(&t).copied().ok_or_else(|| missing("boundary penalty", t))?;
            for side in Side::BOTH {
                let rule = if side == Side::One { &rules.0 } else { &rules.1 };
                if rule.is_empty() {
                    continue;
                }
                let Some(vb) = VelocityBasis::new(&disc.velocity_dofs, t, side) else {
                    continue;
                };
                let pb = self.pressure_basis(t, side)?;
                let mu = cfg.mu[side.index()];
                let lambda = lam[side.index()];
                let trac: Vec<Point> = (0..6)
                    .map(|j| {
                        let v = apply(&vb.strain(j), n);
                        [mu * v[0], mu * v[1]]
                    })
                    .collect();
                for (x, w) in rule.iter() {
                    let phi = vb.values(x);
                    for i in 0..6 {
                        for j in 0..6 {
                            let val = -dot(trac[i], phi[j]) - dot(phi[i], trac[j]) + lambda * dot(phi[i], phi[j]);
                            mat.push(vb.dofs[j], vb.dofs[i], w * val);
                        }
                    }
                    let g = cfg.data.boundary_velocity(side, x);
                    for j in 0..6 {
                        rhs[vb.dofs[j]] += w * (lambda * dot(g, phi[j]) - dot(g, trac[j]));
                    }
                    let chi = pb.values(x);
                    let gn = dot(g, n);
                    for m in 0..3 {
                        rhs[pb.dofs[m]] -= w * gn * chi[m];
                        if cfg.b_form == BForm::Divergence {
                            for j in 0..6 {
                                Self::push_b(mat, pb.dofs[m], vb.dofs[j], -w * dot(phi[j], n) * chi[m]);
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}
