//! Face penalties on jumps of normal derivatives near the interface.

use std::collections::BTreeMap;

use super::{Discretization, ProblemConfig};
use crate::error::Result;
use crate::geometry::Side;
use crate::mesh::dot;
use crate::spaces::{p1_gradients, DofMap};
use crate::sparse::{SparseMatrix, TripletBuilder};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GhostKind {
    /// `μ_i^{-1} h^3` weights on the pressure mesh.
    Pressure,
    /// `μ_i h^s` weights per component on the velocity mesh.
    Velocity,
}

/// Unscaled ghost-penalty matrix over the dofs of one space (`ε` not
/// applied).
pub fn assemble_ghost_penalty(disc: &Discretization, cfg: &ProblemConfig, kind: GhostKind) -> Result<SparseMatrix> {
    let (dofs, cls) = match kind {
        GhostKind::Pressure => (&disc.pressure_dofs, &disc.pressure_cls),
        GhostKind::Velocity => (&disc.velocity_dofs, &disc.velocity_cls),
    };
    let mesh = &dofs.mesh;
    let h = mesh.h_max;
    let mut out = TripletBuilder::new(dofs.n_dofs, dofs.n_dofs);
    for side in Side::BOTH {
        let mu = cfg.mu[side.index()];
        let weight: Box<dyn Fn(usize) -> f64> = match kind {
            GhostKind::Pressure => Box::new(move |_| h.powi(3) / mu),
            GhostKind::Velocity => {
                let coarse = cls.boundary_path_faces(side, mesh);
                Box::new(move |f| if coarse.contains(&f) { mu * h } else { mu * h.powi(3) })
            }
        };
        face_jump_penalty(dofs, &cls.faces_gamma[side.index()], side, &*weight, &mut out);
    }
    Ok(out.build())
}

/// Add `Σ_F weight(F) |F| [[n_F·∇u]] [[n_F·∇v]]` for the side-`side` field.
pub(crate) fn face_jump_penalty(
    dofs: &DofMap,
    faces: &[usize],
    side: Side,
    weight: &dyn Fn(usize) -> f64,
    out: &mut TripletBuilder,
) {
    let mesh = &dofs.mesh;
    for &f in faces {
        let face = &mesh.faces[f];
        let Some(t_minus) = face.elements.1 else { continue };
        let t_plus = face.elements.0;
        let (Some(bp), Some(bm)) = (dofs.element_dofs(t_plus, side), dofs.element_dofs(t_minus, side)) else {
            continue;
        };
        let n = mesh.face_normal(f);
        let gp = p1_gradients(&mesh.points(t_plus));
        let gm = p1_gradients(&mesh.points(t_minus));
        // jump of n·∇ of each vertex hat function
        let mut jump: BTreeMap<usize, f64> = BTreeMap::new();
        for k in 0..3 {
            *jump.entry(bp[k]).or_insert(0.0) += dot(n, gp[k]);
            *jump.entry(bm[k]).or_insert(0.0) -= dot(n, gm[k]);
        }
        let c = weight(f) * mesh.face_length(f);
        for (&da, &ja) in &jump {
            for (&db, &jb) in &jump {
                for comp in 0..dofs.components {
                    out.push(da + comp, db + comp, c * ja * jb);
                }
            }
        }
    }
}
