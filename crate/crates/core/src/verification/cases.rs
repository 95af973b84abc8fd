//! Manufactured solutions and their problem presets.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::assembly::{CurvatureMode, Discretization, FlowData, PenaltyConstants, ProblemConfig};
use crate::error::{Error, Result};
use crate::geometry::{LevelSet, Side};
use crate::mesh::{Point, Rect};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseId {
    /// Polynomial flow through a circle, no jumps.
    Example1Continuous,
    /// Circular drop at rest, pressure jump `σ/R`.
    Example2StaticDrop,
    /// Shear flow across `y = 0` with a viscosity ratio of 100.
    Example3CouetteVisc,
    /// Channel flow across `x = 2` with a unit normal-stress jump.
    Example3CouettePjump,
}

impl CaseId {
    pub const ALL: [CaseId; 4] = [
        CaseId::Example1Continuous,
        CaseId::Example2StaticDrop,
        CaseId::Example3CouetteVisc,
        CaseId::Example3CouettePjump,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CaseId::Example1Continuous => "example1_continuous",
            CaseId::Example2StaticDrop => "example2_static_drop",
            CaseId::Example3CouetteVisc => "example3_couette_visc",
            CaseId::Example3CouettePjump => "example3_couette_pjump",
        }
    }

    /// Short form used on the command line.
    pub fn short(self) -> &'static str {
        match self {
            CaseId::Example1Continuous => "1",
            CaseId::Example2StaticDrop => "2",
            CaseId::Example3CouetteVisc => "3a",
            CaseId::Example3CouettePjump => "3b",
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CaseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CaseId::ALL
            .into_iter()
            .find(|c| c.short() == s || c.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown example '{s}' (expected 1, 2, 3a or 3b)")))
    }
}

/// Exact velocity, its gradient and the pressure on each side.
#[derive(Debug, Clone, PartialEq)]
pub enum ExactSolution {
    /// `u = (20xy³, 5x⁴ - 5y⁴)`, `p = 60x²y - 20y³ - 5`.
    Polynomial { mu: f64 },
    /// `u = 0`, `p₁ = 0`, `p₂ = jump`.
    Rest { jump: f64 },
    /// `u = ((1 - x²)/2, xy)`, `p_i = μ_i x - (μ₁ + μ₂)/4`.
    Shear { mu: [f64; 2] },
    /// `u = (y(H - y)/(μL), 0)`, `p₁ = -x/L`, `p₂ = p₁ + jump`.
    Channel { mu: f64, height: f64, length: f64, jump: f64 },
}

impl ExactSolution {
    pub fn velocity(&self, _side: Side, x: Point) -> [f64; 2] {
        let [px, py] = x;
        match *self {
            ExactSolution::Polynomial { .. } => [20.0 * px * py.powi(3), 5.0 * px.powi(4) - 5.0 * py.powi(4)],
            ExactSolution::Rest { .. } => [0.0, 0.0],
            ExactSolution::Shear { .. } => [0.5 * (1.0 - px * px), px * py],
            ExactSolution::Channel { mu, height, length, .. } => [py * (height - py) / (mu * length), 0.0],
        }
    }

    /// Row `c` is the gradient of component `c`.
    pub fn gradient(&self, _side: Side, x: Point) -> [[f64; 2]; 2] {
        let [px, py] = x;
        match *self {
            ExactSolution::Polynomial { .. } => [
                [20.0 * py.powi(3), 60.0 * px * py * py],
                [20.0 * px.powi(3), -20.0 * py.powi(3)],
            ],
            ExactSolution::Rest { .. } => [[0.0; 2]; 2],
            ExactSolution::Shear { .. } => [[-px, 0.0], [py, px]],
            ExactSolution::Channel { mu, height, length, .. } => [[0.0, (height - 2.0 * py) / (mu * length)], [0.0, 0.0]],
        }
    }

    fn laplacian(&self, x: Point) -> [f64; 2] {
        let [px, py] = x;
        match *self {
            ExactSolution::Polynomial { .. } => [120.0 * px * py, 60.0 * (px * px - py * py)],
            ExactSolution::Rest { .. } => [0.0; 2],
            ExactSolution::Shear { .. } => [-1.0, 0.0],
            ExactSolution::Channel { mu, length, .. } => [-2.0 / (mu * length), 0.0],
        }
    }

    pub fn pressure(&self, side: Side, x: Point) -> f64 {
        let [px, py] = x;
        match *self {
            ExactSolution::Polynomial { .. } => 60.0 * px * px * py - 20.0 * py.powi(3) - 5.0,
            ExactSolution::Rest { jump } => match side {
                Side::One => 0.0,
                Side::Two => jump,
            },
            ExactSolution::Shear { mu } => mu[side.index()] * px - 0.25 * (mu[0] + mu[1]),
            ExactSolution::Channel { length, jump, .. } => {
                -px / length
                    + match side {
                        Side::One => 0.0,
                        Side::Two => jump,
                    }
            }
        }
    }

    fn pressure_gradient(&self, side: Side, x: Point) -> [f64; 2] {
        let [px, py] = x;
        match *self {
            ExactSolution::Polynomial { .. } => [120.0 * px * py, 60.0 * px * px - 60.0 * py * py],
            ExactSolution::Rest { .. } => [0.0; 2],
            ExactSolution::Shear { mu } => [mu[side.index()], 0.0],
            ExactSolution::Channel { length, .. } => [-1.0 / length, 0.0],
        }
    }

    fn viscosity(&self, side: Side) -> Option<f64> {
        match *self {
            ExactSolution::Polynomial { mu } | ExactSolution::Channel { mu, .. } => Some(mu),
            ExactSolution::Shear { mu } => Some(mu[side.index()]),
            ExactSolution::Rest { .. } => None,
        }
    }
}

impl FlowData for ExactSolution {
    /// `f = -(μ/2) Δu + ∇p` (the exact fields are divergence free).
    fn body_force(&self, side: Side, x: Point) -> [f64; 2] {
        let mu = self.viscosity(side).unwrap_or(0.0);
        let l = self.laplacian(x);
        let g = self.pressure_gradient(side, x);
        [-0.5 * mu * l[0] + g[0], -0.5 * mu * l[1] + g[1]]
    }

    fn boundary_velocity(&self, side: Side, x: Point) -> [f64; 2] {
        self.velocity(side, x)
    }
}

/// A complete problem with a known solution.
#[derive(Debug, Clone)]
pub struct ManufacturedCase {
    pub id: CaseId,
    pub domain: Rect,
    pub levelset: LevelSet,
    pub cfg: ProblemConfig,
    pub exact: Arc<ExactSolution>,
}

impl ManufacturedCase {
    /// Preset with the reference constants.
    pub fn preset(id: CaseId) -> Self {
        let rect = |x0, y0, x1, y1| Rect::new(x0, y0, x1, y1).expect("preset domain");
        let (domain, levelset, mu, exact) = match id {
            CaseId::Example1Continuous => (
                rect(0.0, 0.0, 1.0, 1.0),
                LevelSet::Circle { center: [0.5, 0.5], radius: 0.3 },
                [2.0, 2.0],
                ExactSolution::Polynomial { mu: 2.0 },
            ),
            CaseId::Example2StaticDrop => (
                rect(-1.0, -1.0, 1.0, 1.0),
                LevelSet::Circle { center: [0.0, 0.0], radius: 0.5 },
                [2.0, 2.0],
                ExactSolution::Rest { jump: 2.0 },
            ),
            CaseId::Example3CouetteVisc => (
                rect(0.0, -0.4, 1.0, 0.6),
                LevelSet::HorizontalLine { y: 0.0 },
                [2.0, 200.0],
                ExactSolution::Shear { mu: [2.0, 200.0] },
            ),
            CaseId::Example3CouettePjump => (
                rect(0.0, 0.0, 3.0, 1.0),
                LevelSet::VerticalLine { x: 2.0 },
                [2.0, 2.0],
                ExactSolution::Channel { mu: 2.0, height: 1.0, length: 3.0, jump: 1.0 },
            ),
        };
        let exact = Arc::new(exact);
        let mut cfg = ProblemConfig::new(mu, exact.clone());
        match id {
            CaseId::Example1Continuous => {}
            CaseId::Example2StaticDrop => {
                cfg.sigma = 1.0;
                cfg.curvature = CurvatureMode::Constant(2.0);
            }
            CaseId::Example3CouetteVisc => cfg.penalty = PenaltyConstants::couette(),
            CaseId::Example3CouettePjump => {
                cfg.penalty = PenaltyConstants::couette();
                // the unit normal-stress jump goes through the surface-tension slot
                cfg.sigma = 1.0;
                cfg.curvature = CurvatureMode::Constant(1.0);
            }
        }
        ManufacturedCase {
            id,
            domain,
            levelset,
            cfg,
            exact,
        }
    }

    /// Pressure-mesh cell counts for a velocity mesh with `nx` columns.
    pub fn pressure_counts(&self, nx: usize) -> Result<(usize, usize)> {
        if nx < 4 || nx % 2 != 0 {
            return Err(Error::invalid(format!("nx must be even and at least 4, got {nx}")));
        }
        let nx_p = nx / 2;
        let ny_p = ((nx_p as f64 * self.domain.height() / self.domain.width()).round() as usize).max(2);
        Ok((nx_p, ny_p))
    }

    /// Velocity mesh size `h_x` for `nx` velocity columns.
    pub fn h_x(&self, nx: usize) -> f64 {
        self.domain.width() / nx as f64
    }

    pub fn discretize(&self, nx: usize) -> Result<Discretization> {
        let (nx_p, ny_p) = self.pressure_counts(nx)?;
        Discretization::new(self.domain, nx_p, ny_p, self.levelset)
    }

    /// Same case with a straight interface moved to `x_k + delta * h_x`,
    /// `x_k` the pressure-mesh line nearest the original position.
    pub fn with_interface_offset(&self, nx: usize, delta: f64) -> Result<Self> {
        let (nx_p, ny_p) = self.pressure_counts(nx)?;
        let levelset = match self.levelset {
            LevelSet::VerticalLine { x } => {
                let hp = self.domain.width() / nx_p as f64;
                let k = ((x - self.domain.x0) / hp).round();
                LevelSet::VerticalLine { x: self.domain.x0 + k * hp + delta * 0.5 * hp }
            }
            LevelSet::HorizontalLine { y } => {
                let hp = self.domain.height() / ny_p as f64;
                let k = ((y - self.domain.y0) / hp).round();
                LevelSet::HorizontalLine { y: self.domain.y0 + k * hp + delta * 0.5 * hp }
            }
            LevelSet::Circle { .. } => {
                return Err(Error::invalid("interface offsets need a straight-line interface"));
            }
        };
        let mut out = self.clone();
        out.levelset = levelset;
        Ok(out)
    }
}
