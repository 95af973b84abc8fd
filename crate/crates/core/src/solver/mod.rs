//! Direct solves and spectral diagnostics.

mod condition;
mod infsup;
mod lanczos;

pub use condition::{
    condition_number_with, estimate_condition_number, system_condition, ConditionMethod, ConditionReport,
    DENSE_LIMIT,
};
pub use infsup::{estimate_infsup, infsup_constant, INFSUP_DENSE_LIMIT};

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Lu;
use faer::sparse::linalg::LuError;
use faer::Mat;

use crate::assembly::{AssembledSystem, Discretization};
use crate::error::{Error, Result};
use crate::spaces::FieldPair;
use crate::sparse::SparseMatrix;

/// Sparse LU factors of a square matrix.
pub struct LuFactor {
    lu: Lu<usize, f64>,
    n: usize,
}

impl std::fmt::Debug for LuFactor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LuFactor").field("n", &self.n).finish()
    }
}

impl LuFactor {
    pub fn new(m: &SparseMatrix) -> Result<Self> {
        if m.nrows != m.ncols {
            return Err(Error::invalid(format!("matrix is {} x {}, not square", m.nrows, m.ncols)));
        }
        let lu = m.to_faer()?.sp_lu().map_err(|e| match e {
            LuError::SymbolicSingular { index } => Error::Singular { pivot: index },
            LuError::Generic(g) => Error::Solver(format!("factorization failed: {g:?}")),
        })?;
        Ok(LuFactor { lu, n: m.nrows })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn finish(x: Mat<f64>) -> Result<Vec<f64>> {
        let out: Vec<f64> = (0..x.nrows()).map(|i| x[(i, 0)]).collect();
        if let Some(pivot) = out.iter().position(|v| !v.is_finite()) {
            return Err(Error::Singular { pivot });
        }
        Ok(out)
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut x = Mat::<f64>::from_fn(self.n, 1, |i, _| b[i]);
        self.lu.solve_in_place(x.as_mut());
        Self::finish(x)
    }

    pub fn solve_transpose(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut x = Mat::<f64>::from_fn(self.n, 1, |i, _| b[i]);
        self.lu.solve_transpose_in_place(x.as_mut());
        Self::finish(x)
    }
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Solve `m x = b` with a few steps of iterative refinement. Returns `x`
/// and the relative residual (absolute when `b = 0`).
pub fn solve_linear(m: &SparseMatrix, b: &[f64]) -> Result<(Vec<f64>, f64)> {
    if b.len() != m.nrows {
        return Err(Error::invalid("right-hand side length does not match the matrix"));
    }
    let lu = LuFactor::new(m)?;
    let mut x = lu.solve(b)?;
    let bnorm = norm2(b);
    let scale = if bnorm > 0.0 { bnorm } else { 1.0 };
    let residual = |x: &[f64]| -> Vec<f64> { m.matvec(x).iter().zip(b).map(|(ax, bi)| bi - ax).collect() };
    let mut r = residual(&x);
    let mut rel = norm2(&r) / scale;
    for _ in 0..3 {
        if rel <= 1e-15 {
            break;
        }
        let dx = lu.solve(&r)?;
        let trial: Vec<f64> = x.iter().zip(&dx).map(|(a, d)| a + d).collect();
        let rt = residual(&trial);
        let relt = norm2(&rt) / scale;
        if relt >= rel {
            break;
        }
        x = trial;
        r = rt;
        rel = relt;
    }
    Ok((x, rel))
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub u: FieldPair,
    pub p: FieldPair,
    pub multiplier: f64,
    pub residual_norm: f64,
}

/// Factor and solve the assembled system.
pub fn solve_direct(sys: &AssembledSystem, disc: &Discretization) -> Result<Solution> {
    let (x, residual_norm) = solve_linear(&sys.matrix, &sys.rhs)?;
    let b = &sys.blocks;
    Ok(Solution {
        u: FieldPair::new(x[b.velocity.clone()].to_vec(), disc.velocity_dofs.clone())?,
        p: FieldPair::new(x[b.pressure.clone()].to_vec(), disc.pressure_dofs.clone())?,
        multiplier: x[b.multiplier],
        residual_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_solve() {
        let m = SparseMatrix::from_dense(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let (x, r) = solve_linear(&m, &[1.0, 0.0]).unwrap();
        assert_eq!(x, vec![1.0, 0.0]);
        assert!(r < 1e-15);
    }

    #[test]
    fn structurally_singular_reports_pivot() {
        let m = SparseMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (1, 0, 1.0)]);
        assert!(matches!(solve_linear(&m, &[1.0, 1.0]), Err(Error::Singular { .. })));
    }

    #[test]
    fn numerically_singular_is_detected() {
        let m = SparseMatrix::from_dense(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert!(matches!(solve_linear(&m, &[1.0, 2.0]), Err(Error::Singular { .. })));
    }

    #[test]
    fn transpose_solve() {
        let m = SparseMatrix::from_dense(&[vec![2.0, 1.0], vec![0.0, 4.0]]);
        let lu = LuFactor::new(&m).unwrap();
        let y = lu.solve_transpose(&[2.0, 9.0]).unwrap();
        // m^T y = [2 y0, y0 + 4 y1]
        assert!((y[0] - 1.0).abs() < 1e-15 && (y[1] - 2.0).abs() < 1e-15);
    }
}
