//! Gram matrices of the discrete velocity and pressure norms.

use super::ghost::{assemble_ghost_penalty, GhostKind};
use super::kernels::{apply, contract, VelocityBasis};
use super::weights::PenaltyParams;
use super::{Discretization, InterfaceNormal, ProblemConfig};
use crate::error::Result;
use crate::geometry::quadrature::{boundary_quadrature, interface_quadrature, subpolygon_quadrature, triangle_rule};
use crate::geometry::Side;
use crate::mesh::{barycentric, dot, Point};
use crate::sparse::{SparseMatrix, TripletBuilder};

/// `(N_u, N_p)`: velocity energy norm with interface and boundary trace
/// terms plus the velocity ghost penalty; weighted pressure mass on the
/// active triangles plus the pressure ghost penalty.
pub fn assemble_norm_matrices(disc: &Discretization, cfg: &ProblemConfig) -> Result<(SparseMatrix, SparseMatrix)> {
    let params = PenaltyParams::compute(disc, cfg)?;
    let vdofs = &disc.velocity_dofs;
    let vmesh = &disc.velocity_mesh;
    let mut nu = TripletBuilder::new(vdofs.n_dofs, vdofs.n_dofs);

    for t in 0..vmesh.n_triangles() {
        let ce = disc.velocity_cls.element(t);
        for side in Side::BOTH {
            let Some(vb) = VelocityBasis::new(vdofs, t, side) else { continue };
            let rule = subpolygon_quadrature(&ce.subpolygons[side.index()], 1)?;
            let area = rule.measure();
            if area == 0.0 {
                continue;
            }
            let mu = cfg.mu[side.index()];
            let st: Vec<_> = (0..6).map(|j| vb.strain(j)).collect();
            for a in 0..6 {
                for b in 0..6 {
                    nu.push(vb.dofs[a], vb.dofs[b], mu * area * contract(&st[a], &st[b]));
                }
            }
        }
    }

    let [mu1, mu2] = cfg.mu;
    for (s, seg) in disc.velocity_cls.interface.iter().enumerate() {
        let ([k1, k2], _) = params.interface[s];
        let avg_mu = k1 * mu1 + k2 * mu2;
        let h = vmesh.diameter(seg.owner);
        let [e1, e2] = seg.elements;
        let (Some(vb1), Some(vb2)) = (VelocityBasis::new(vdofs, e1, Side::One), VelocityBasis::new(vdofs, e2, Side::Two)) else {
            continue;
        };
        let rule = interface_quadrature(seg.points, 5);
        for (x, w) in rule.iter() {
            let n = match cfg.normal {
                InterfaceNormal::LevelSet => disc.levelset.normal(x),
                InterfaceNormal::Chord => seg.normal,
            };
            let mut f: Vec<(usize, Point, Point)> = Vec::with_capacity(12);
            let p1 = vb1.values(x);
            for j in 0..6 {
                let tr = apply(&vb1.strain(j), n);
                f.push((vb1.dofs[j], p1[j], [k1 * mu1 * tr[0], k1 * mu1 * tr[1]]));
            }
            let p2 = vb2.values(x);
            for j in 0..6 {
                let tr = apply(&vb2.strain(j), n);
                f.push((vb2.dofs[j], [-p2[j][0], -p2[j][1]], [k2 * mu2 * tr[0], k2 * mu2 * tr[1]]));
            }
            for &(da, ja, fa) in &f {
                for &(db, jb, fb) in &f {
                    let val = h * dot(fa, fb) / avg_mu + avg_mu * dot(ja, jb) / h;
                    nu.push(da, db, w * val);
                }
            }
        }
    }

    for (fi, face) in vmesh.faces.iter().enumerate() {
        if !face.is_boundary() {
            continue;
        }
        let t = face.elements.0;
        let n = vmesh.face_normal(fi);
        let h = vmesh.diameter(t);
        let (a, b) = (vmesh.vertices[face.vertices[0]], vmesh.vertices[face.vertices[1]]);
        let rules = boundary_quadrature(a, b, &disc.levelset, 3);
        for side in Side::BOTH {
            let rule = if side == Side::One { &rules.0 } else { &rules.1 };
            let Some(vb) = VelocityBasis::new(vdofs, t, side) else { continue };
            let mu = cfg.mu[side.index()];
            let tr: Vec<Point> = (0..6).map(|j| apply(&vb.strain(j), n)).collect();
            for (x, w) in rule.iter() {
                let phi = vb.values(x);
                for a in 0..6 {
                    for b in 0..6 {
                        let val = h * mu * dot(tr[a], tr[b]) + mu * dot(phi[a], phi[b]) / h;
                        nu.push(vb.dofs[a], vb.dofs[b], w * val);
                    }
                }
            }
        }
    }
    let ju = assemble_ghost_penalty(disc, cfg, GhostKind::Velocity)?;
    let nu = nu.build().add(&ju)?;

    let pdofs = &disc.pressure_dofs;
    let pmesh = &disc.pressure_mesh;
    let mut np = TripletBuilder::new(pdofs.n_dofs, pdofs.n_dofs);
    for t in 0..pmesh.n_triangles() {
        let pts = pmesh.points(t);
        let rule = triangle_rule(&pts, 2)?;
        for side in Side::BOTH {
            let Some(base) = pdofs.element_dofs(t, side) else { continue };
            let mu = cfg.mu[side.index()];
            for (x, w) in rule.iter() {
                let l = barycentric(&pts, x);
                for a in 0..3 {
                    for b in 0..3 {
                        np.push(base[a], base[b], w * l[a] * l[b] / mu);
                    }
                }
            }
        }
    }
    let jp = assemble_ghost_penalty(disc, cfg, GhostKind::Pressure)?;
    let np = np.build().add(&jp)?;
    Ok((nu, np))
}
