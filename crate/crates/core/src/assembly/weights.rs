//! Interface averaging weights and Nitsche penalty parameters.

use std::collections::BTreeMap;

use super::{BoundaryPenalty, Discretization, PenaltyConstants, ProblemConfig};
use crate::error::{Error, Result};
use crate::geometry::{CutClassification, InterfaceSegment, Side};
use crate::mesh::TriMesh;

/// Geometric data entering the interface weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InterfaceGeometry {
    /// Interface crossing the interior of one triangle.
    Cut { alpha: [f64; 2], gamma: f64, h: f64 },
    /// Interface on a mesh edge between `t` (side one) and `k` (side two).
    /// `alpha_*` is `|T| / h_T^2`, `gamma_*` is `|edge| / h_T`.
    Edge {
        alpha_t: f64,
        gamma_t: f64,
        alpha_k: f64,
        gamma_k: f64,
        length: f64,
    },
}

impl InterfaceGeometry {
    pub fn from_segment(seg: &InterfaceSegment, mesh: &TriMesh, cls: &CutClassification) -> Self {
        if seg.is_edge() {
            let [t, k] = seg.elements;
            let (ht, hk) = (mesh.diameter(t), mesh.diameter(k));
            InterfaceGeometry::Edge {
                alpha_t: mesh.area(t) / (ht * ht),
                gamma_t: seg.length / ht,
                alpha_k: mesh.area(k) / (hk * hk),
                gamma_k: seg.length / hk,
                length: seg.length,
            }
        } else {
            let ce = cls.element(seg.owner);
            InterfaceGeometry::Cut {
                alpha: ce.alpha,
                gamma: ce.gamma,
                h: ce.h,
            }
        }
    }
}

fn check_mu(mu: [f64; 2]) -> Result<()> {
    if mu.iter().any(|&m| !(m > 0.0) || !m.is_finite()) {
        return Err(Error::invalid(format!("viscosities must be positive, got {mu:?}")));
    }
    Ok(())
}

/// Weights `(κ1, κ2)` of the interface average `{a} = κ1 a1 + κ2 a2`.
pub fn compute_nitsche_weights(geom: &InterfaceGeometry, mu: [f64; 2]) -> Result<[f64; 2]> {
    check_mu(mu)?;
    let [mu1, mu2] = mu;
    let k = match *geom {
        InterfaceGeometry::Cut { alpha, .. } => {
            let den = mu1 * alpha[1] + mu2 * alpha[0];
            if !(den > 0.0) {
                return Err(Error::invalid("cut triangle with no area on either side"));
            }
            let k1 = mu2 * alpha[0] / den;
            [k1, 1.0 - k1]
        }
        InterfaceGeometry::Edge {
            alpha_t,
            gamma_t,
            alpha_k,
            gamma_k,
            ..
        } => {
            let r = gamma_t / gamma_k;
            let den = mu1 * alpha_k * r * r + mu2 * alpha_t;
            let k1 = mu2 * alpha_t / den;
            [k1, 1.0 - k1]
        }
    };
    Ok(k)
}

/// Interface penalty `λ_Γ` for one interface piece.
pub fn compute_lambda_gamma(geom: &InterfaceGeometry, mu: [f64; 2], pc: &PenaltyConstants) -> Result<f64> {
    let kappa = compute_nitsche_weights(geom, mu)?;
    let [mu1, mu2] = mu;
    let avg_mu = kappa[0] * mu1 + kappa[1] * mu2;
    let lambda = match *geom {
        InterfaceGeometry::Cut { alpha, gamma, h } => {
            let eta = pc.d * avg_mu
                + (1.0 + pc.b) * gamma * mu1 * mu2 / (pc.a * (mu1 * alpha[1] + mu2 * alpha[0]));
            eta / h
        }
        InterfaceGeometry::Edge {
            alpha_t,
            gamma_t,
            alpha_k,
            gamma_k,
            length,
        } => {
            let eta = pc.d * gamma_k * avg_mu
                + (1.0 + pc.b) * mu1 * mu2
                    / (pc.a * (mu1 * alpha_k / (gamma_k * gamma_k) + mu2 * alpha_t / (gamma_t * gamma_t)));
            eta / length
        }
    };
    Ok(lambda)
}

/// Geometric data entering the boundary penalty of one triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryGeometry {
    pub h: f64,
    /// `|K| / h_K^2`.
    pub alpha: f64,
    /// `|∂Ω ∩ K| / h_K`.
    pub gamma_boundary: f64,
    pub cut: bool,
}

/// Boundary penalty `λ_∂Ω` on side `i` of a boundary triangle.
///
/// `h_x` is the grid spacing used by [`BoundaryPenalty::Fixed`].
pub fn compute_lambda_boundary(
    geom: &BoundaryGeometry,
    mu_i: f64,
    c_q: f64,
    pc: &PenaltyConstants,
    h_x: f64,
) -> Result<f64> {
    if !(mu_i > 0.0) {
        return Err(Error::invalid("viscosity must be positive"));
    }
    match pc.boundary {
        BoundaryPenalty::Fixed(c) => Ok(c / h_x),
        BoundaryPenalty::Formula => {
            let scale = if geom.cut { 2.0 * c_q } else { 1.0 };
            let eta = pc.g * mu_i + scale * (1.0 + pc.f) * mu_i * geom.gamma_boundary / (pc.e * geom.alpha);
            Ok(eta / geom.h)
        }
    }
}

/// Per-piece interface weights and per-triangle boundary penalties.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyParams {
    /// `(κ, λ_Γ)` aligned with the classification's interface pieces.
    pub interface: Vec<([f64; 2], f64)>,
    /// `λ_∂Ω` per boundary triangle and side.
    pub boundary: BTreeMap<usize, [f64; 2]>,
}

impl PenaltyParams {
    pub fn compute(disc: &Discretization, cfg: &ProblemConfig) -> Result<Self> {
        let mesh = &disc.velocity_mesh;
        let cls = &disc.velocity_cls;
        cfg.penalty.validate(cls.max_n)?;
        let mut interface = Vec::with_capacity(cls.interface.len());
        for seg in &cls.interface {
            let geom = InterfaceGeometry::from_segment(seg, mesh, cls);
            interface.push((
                compute_nitsche_weights(&geom, cfg.mu)?,
                compute_lambda_gamma(&geom, cfg.mu, &cfg.penalty)?,
            ));
        }
        let mut boundary = BTreeMap::new();
        for &t in &cls.k_boundary {
            let ce = cls.element(t);
            let geom = BoundaryGeometry {
                h: ce.h,
                alpha: ce.area / (ce.h * ce.h),
                gamma_boundary: ce.gamma_boundary,
                cut: ce.is_cut(),
            };
            let mut lam = [0.0; 2];
            for side in Side::BOTH {
                lam[side.index()] = compute_lambda_boundary(
                    &geom,
                    cfg.mu[side.index()],
                    cls.c_q,
                    &cfg.penalty,
                    mesh.spacing[0],
                )?;
            }
            boundary.insert(t, lam);
        }
        Ok(PenaltyParams { interface, boundary })
    }
}
