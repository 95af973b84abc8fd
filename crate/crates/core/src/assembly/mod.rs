//! Global system for the stabilized two-phase Stokes problem.

mod ghost;
mod kernels;
mod norms;
mod weights;

use std::fmt;
use std::ops::Range;
use std::sync::Arc;

pub use ghost::{assemble_ghost_penalty, GhostKind};
pub use norms::assemble_norm_matrices;
pub use weights::{
    compute_lambda_boundary, compute_lambda_gamma, compute_nitsche_weights, BoundaryGeometry,
    InterfaceGeometry, PenaltyParams,
};

use crate::error::{Error, Result};
use crate::geometry::quadrature::subpolygon_quadrature;
use crate::geometry::{classify, CutClassification, LevelSet, Side};
use crate::mesh::{barycentric, build_structured_mesh, uniform_refine, Point, Rect, RefinementMap, TriMesh};
use crate::spaces::DofMap;
use crate::sparse::{SparseMatrix, TripletBuilder};

/// Which of the two equivalent forms of the pressure-velocity coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BForm {
    /// `-(w, ∇q) + ([[q]], <w·n>)_Γ`
    #[default]
    Gradient,
    /// `(∇·w, q) - ([[n·w]], {q})_Γ - (n·w, q)_∂Ω`
    Divergence,
}

/// Curvature used in the surface-tension load.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum CurvatureMode {
    /// Curvature of the level set at each quadrature point.
    #[default]
    Exact,
    Constant(f64),
}

/// Normal used by the interface terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InterfaceNormal {
    /// Level-set normal evaluated at each quadrature point of the chord.
    #[default]
    LevelSet,
    /// Constant normal of the straight chord.
    Chord,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryPenalty {
    /// Penalty from the cut-aware formula with constants `E`, `F`, `G`.
    Formula,
    /// `λ_∂Ω = c / h_x` on every boundary triangle.
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyConstants {
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub boundary: BoundaryPenalty,
}

impl PenaltyConstants {
    /// `(1+B)/A = 2`, `D = 0.05`, `λ_∂Ω = 15/h_x`.
    pub fn continuous_flow() -> Self {
        PenaltyConstants {
            a: 0.525,
            b: 0.05,
            d: 0.05,
            e: 0.25,
            f: 0.005,
            g: 0.005,
            boundary: BoundaryPenalty::Fixed(15.0),
        }
    }

    /// `A = 0.3`, `B = D = 0.05`, `E = 0.25`, `F = G = 0.005`.
    pub fn couette() -> Self {
        PenaltyConstants {
            a: 0.3,
            b: 0.05,
            d: 0.05,
            e: 0.25,
            f: 0.005,
            g: 0.005,
            boundary: BoundaryPenalty::Formula,
        }
    }

    /// Range checks; `max_n` is the largest number of cut boundary
    /// triangles sharing one interior neighbour.
    pub fn validate(&self, max_n: usize) -> Result<()> {
        let bad = |what: &str| Err(Error::invalid(format!("penalty constant out of range: {what}")));
        if !(self.a > 0.0 && self.a < 1.0) {
            return bad("A must lie in (0, 1)");
        }
        if !(self.b > 0.0) || !(self.d > 0.0) {
            return bad("B and D must be positive");
        }
        match self.boundary {
            BoundaryPenalty::Fixed(c) => {
                if !(c > 0.0) {
                    return bad("fixed boundary penalty must be positive");
                }
            }
            BoundaryPenalty::Formula => {
                if !(self.f > 0.0) || !(self.g > 0.0) {
                    return bad("F and G must be positive");
                }
                let e_max = (1.0 - self.a) / (1.0 + max_n as f64);
                if !(self.e > 0.0 && self.e < e_max) {
                    return bad(&format!("E must lie in (0, {e_max})"));
                }
            }
        }
        Ok(())
    }
}

/// Body force and boundary velocity.
pub trait FlowData: Send + Sync + fmt::Debug {
    fn body_force(&self, side: Side, x: Point) -> [f64; 2];
    fn boundary_velocity(&self, side: Side, x: Point) -> [f64; 2];
}

/// `f = 0`, `g = 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroData;

impl FlowData for ZeroData {
    fn body_force(&self, _: Side, _: Point) -> [f64; 2] {
        [0.0; 2]
    }
    fn boundary_velocity(&self, _: Side, _: Point) -> [f64; 2] {
        [0.0; 2]
    }
}

#[derive(Debug, Clone)]
pub struct ProblemConfig {
    /// Values of the viscosity field on each side.
    pub mu: [f64; 2],
    pub sigma: f64,
    pub curvature: CurvatureMode,
    pub eps_u: f64,
    pub eps_p: f64,
    pub b_form: BForm,
    pub normal: InterfaceNormal,
    pub penalty: PenaltyConstants,
    pub data: Arc<dyn FlowData>,
}

impl ProblemConfig {
    pub fn new(mu: [f64; 2], data: Arc<dyn FlowData>) -> Self {
        ProblemConfig {
            mu,
            sigma: 0.0,
            curvature: CurvatureMode::Exact,
            eps_u: 1e-3,
            eps_p: 1.0,
            b_form: BForm::Gradient,
            normal: InterfaceNormal::LevelSet,
            penalty: PenaltyConstants::continuous_flow(),
            data,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mu.iter().any(|&m| !(m > 0.0) || !m.is_finite()) {
            return Err(Error::invalid("viscosities must be positive and finite"));
        }
        if !(self.eps_u >= 0.0) || !(self.eps_p >= 0.0) {
            return Err(Error::invalid("stabilization scalings must be non-negative"));
        }
        if !self.sigma.is_finite() {
            return Err(Error::invalid("surface tension must be finite"));
        }
        self.penalty.validate(0)
    }
}

/// Coarse pressure mesh, its refinement for the velocity and everything the
/// interface does to both.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub levelset: LevelSet,
    pub pressure_mesh: Arc<TriMesh>,
    pub velocity_mesh: Arc<TriMesh>,
    pub refinement: RefinementMap,
    pub pressure_cls: CutClassification,
    pub velocity_cls: CutClassification,
    pub pressure_dofs: Arc<DofMap>,
    pub velocity_dofs: Arc<DofMap>,
}

impl Discretization {
    /// Pressure mesh with `nx_p * ny_p` cells; the velocity mesh is its
    /// uniform refinement.
    pub fn new(domain: Rect, nx_p: usize, ny_p: usize, levelset: LevelSet) -> Result<Self> {
        let pmesh = build_structured_mesh(domain, nx_p, ny_p)?;
        let (vmesh, refinement) = uniform_refine(&pmesh)?;
        let pressure_cls = classify(&pmesh, &levelset)?;
        let velocity_cls = classify(&vmesh, &levelset)?;
        // a pressure triangle must carry a side's field wherever one of its
        // children does
        let mut p_in_side = pressure_cls.in_side.clone();
        for side in Side::BOTH {
            let i = side.index();
            for (p, kids) in refinement.children.iter().enumerate() {
                if kids.iter().any(|&k| velocity_cls.in_side[i][k]) {
                    p_in_side[i][p] = true;
                }
            }
        }
        // such triangles can hold slivers the coarse classification missed
        // (an edge crossed twice); their faces join the ghost-penalty set so
        // the extra dofs stay controlled
        let mut pcls_ext = pressure_cls.clone();
        for side in Side::BOTH {
            let i = side.index();
            let mut faces: std::collections::BTreeSet<usize> = pcls_ext.faces_gamma[i].iter().copied().collect();
            for p in 0..pmesh.n_triangles() {
                if p_in_side[i][p] && !pressure_cls.in_side[i][p] {
                    for &f in &pmesh.triangle_faces[p] {
                        if !pmesh.faces[f].is_boundary() {
                            faces.insert(f);
                        }
                    }
                }
            }
            pcls_ext.faces_gamma[i] = faces.into_iter().collect();
        }
        pcls_ext.in_side = p_in_side;
        let pmesh = Arc::new(pmesh);
        let vmesh = Arc::new(vmesh);
        let pressure_dofs = Arc::new(DofMap::new(pmesh.clone(), &pcls_ext, 1));
        let velocity_dofs = Arc::new(DofMap::new(vmesh.clone(), &velocity_cls, 2));
        Ok(Discretization {
            levelset,
            pressure_mesh: pmesh,
            velocity_mesh: vmesh,
            refinement,
            pressure_cls: pcls_ext,
            velocity_cls,
            pressure_dofs,
            velocity_dofs,
        })
    }

    pub fn n_u(&self) -> usize {
        self.velocity_dofs.n_dofs
    }

    pub fn n_p(&self) -> usize {
        self.pressure_dofs.n_dofs
    }

    pub fn n_total(&self) -> usize {
        self.n_u() + self.n_p() + 1
    }

    pub fn blocks(&self) -> BlockStructure {
        let (nu, np) = (self.n_u(), self.n_p());
        BlockStructure {
            velocity: 0..nu,
            pressure: nu..nu + np,
            multiplier: nu + np,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockStructure {
    pub velocity: Range<usize>,
    pub pressure: Range<usize>,
    pub multiplier: usize,
}

impl BlockStructure {
    pub fn size(&self) -> usize {
        self.multiplier + 1
    }
}

#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub matrix: SparseMatrix,
    pub rhs: Vec<f64>,
    pub blocks: BlockStructure,
    /// Pressure part of the mean-value constraint.
    pub constraint: Vec<f64>,
}

impl AssembledSystem {
    /// The matrix without the multiplier row and column.
    pub fn unbordered(&self) -> SparseMatrix {
        let n = self.blocks.multiplier;
        self.matrix.submatrix(0..n, 0..n)
    }
}

/// Assemble matrix and right-hand side.
pub fn assemble_system(disc: &Discretization, cfg: &ProblemConfig) -> Result<AssembledSystem> {
    cfg.validate()?;
    let params = PenaltyParams::compute(disc, cfg)?;
    let blocks = disc.blocks();
    let n = blocks.size();
    let mut mat = TripletBuilder::new(n, n);
    let mut rhs = vec![0.0; n];

    let forms = kernels::Forms::new(disc, cfg, &params);
    forms.bulk(&mut mat, &mut rhs)?;
    forms.interface(&mut mat, &mut rhs)?;
    forms.boundary(&mut mat, &mut rhs)?;

    let off = blocks.pressure.start;
    if cfg.eps_u > 0.0 {
        let ju = assemble_ghost_penalty(disc, cfg, GhostKind::Velocity)?;
        for (i, j, v) in ju.triplets() {
            mat.push(i, j, cfg.eps_u * v);
        }
    }
    if cfg.eps_p > 0.0 {
        let jp = assemble_ghost_penalty(disc, cfg, GhostKind::Pressure)?;
        for (i, j, v) in jp.triplets() {
            mat.push(off + i, off + j, cfg.eps_p * v);
        }
    }

    let constraint = refined_mean_constraint(disc, cfg.mu)?;
    for (j, &c) in constraint.iter().enumerate() {
        mat.push(off + j, blocks.multiplier, c);
        mat.push(blocks.multiplier, off + j, c);
    }

    Ok(AssembledSystem {
        matrix: mat.build(),
        rhs,
        blocks,
        constraint,
    })
}

/// Row of the mean-value constraint `Σ_i μ_i⁻¹ (q_i, 1)_{Ω_i}`, integrated
/// over the cut geometry of the velocity mesh.
pub fn refined_mean_constraint(disc: &Discretization, mu: [f64; 2]) -> Result<Vec<f64>> {
    let pdofs = &disc.pressure_dofs;
    let mut c = vec![0.0; pdofs.n_dofs];
    for t in 0..disc.velocity_mesh.n_triangles() {
        let parent = disc.refinement.parent[t];
        let ppts = disc.pressure_mesh.points(parent);
        let ce = disc.velocity_cls.element(t);
        for side in Side::BOTH {
            let poly = &ce.subpolygons[side.index()];
            if poly.is_empty() {
                continue;
            }
            let Some(base) = pdofs.element_dofs(parent, side) else { continue };
            let rule = subpolygon_quadrature(poly, 2)?;
            for (x, w) in rule.iter() {
                let l = barycentric(&ppts, x);
                for k in 0..3 {
                    c[base[k]] += w * l[k] / mu[side.index()];
                }
            }
        }
    }
    Ok(c)
}
