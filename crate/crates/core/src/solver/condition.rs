//! Spectral condition numbers.

use faer::{Mat, Side};

use super::lanczos::{largest_magnitude, LanczosOptions};
use super::{norm2, LuFactor};
use crate::assembly::AssembledSystem;
use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// Above this dimension the iterative estimator is used.
pub const DENSE_LIMIT: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConditionMethod {
    /// Dense up to [`DENSE_LIMIT`], iterative above.
    #[default]
    Auto,
    Dense,
    Iterative,
}

impl ConditionMethod {
    fn dense_for(self, n: usize) -> bool {
        match self {
            ConditionMethod::Auto => n <= DENSE_LIMIT,
            ConditionMethod::Dense => true,
            ConditionMethod::Iterative => false,
        }
    }
}

/// `σ_max / σ_min` of a square sparse matrix; infinite when singular.
pub fn estimate_condition_number(m: &SparseMatrix) -> Result<f64> {
    condition_number_with(m, ConditionMethod::Auto)
}

pub fn condition_number_with(m: &SparseMatrix, method: ConditionMethod) -> Result<f64> {
    if m.nrows != m.ncols || m.nrows == 0 {
        return Err(Error::invalid("condition number needs a non-empty square matrix"));
    }
    let n = m.nrows;
    if method.dense_for(n) {
        let sv = m
            .to_dense()
            .singular_values()
            .map_err(|e| Error::Solver(format!("SVD failed: {e:?}")))?;
        let (smax, smin) = (sv[0], sv[n - 1]);
        return Ok(ratio(smax, smin));
    }
    let lu = match LuFactor::new(m) {
        Ok(lu) => lu,
        Err(Error::Singular { .. }) => return Ok(f64::INFINITY),
        Err(e) => return Err(e),
    };
    let mt = m.transpose();
    let opts = LanczosOptions::default();
    let mut fwd = |x: &[f64]| Ok(mt.matvec(&m.matvec(x)));
    let lmax = largest_magnitude(n, &mut fwd, None, opts)?;
    let mut inv = |x: &[f64]| lu.solve(&lu.solve_transpose(x)?);
    let lmin_inv = match largest_magnitude(n, &mut inv, None, opts) {
        Ok(v) => v,
        Err(Error::Singular { .. }) => return Ok(f64::INFINITY),
        Err(e) => return Err(e),
    };
    Ok((lmax * lmin_inv).abs().sqrt())
}

fn ratio(max: f64, min: f64) -> f64 {
    if min <= max * 1e-300 || min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionReport {
    /// Condition number of the system without the multiplier, restricted to
    /// the complement of the constant-pressure direction.
    pub deflated: f64,
    /// Condition number of the full bordered matrix, when requested.
    pub bordered: Option<f64>,
}

/// Householder vector `v` with `(I - 2 v v^T) z = e_last` for a unit `z`.
fn householder_to_last(z: &[f64]) -> Option<Vec<f64>> {
    let n = z.len();
    let mut v = z.to_vec();
    v[n - 1] -= 1.0;
    let nv = norm2(&v);
    if nv < 1e-14 {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= nv);
    Some(v)
}

/// Condition numbers of an assembled system.
///
/// The pressure rows are negated first, which makes the matrix symmetric
/// without changing its singular values.
pub fn system_condition(sys: &AssembledSystem, method: ConditionMethod, with_bordered: bool) -> Result<ConditionReport> {
    let m = sys.unbordered();
    let n = m.nrows;
    let s = m.scale_rows(sys.blocks.pressure.clone(), -1.0);
    let np = sys.blocks.pressure.len();
    let mut z = vec![0.0; n];
    for i in sys.blocks.pressure.clone() {
        z[i] = 1.0 / (np as f64).sqrt();
    }

    let deflated = if method.dense_for(n) {
        let mut d = s.to_dense();
        // symmetrise against summation-order noise
        for i in 0..n {
            for j in 0..i {
                let a = 0.5 * (d[(i, j)] + d[(j, i)]);
                d[(i, j)] = a;
                d[(j, i)] = a;
            }
        }
        let reduced = match householder_to_last(&z) {
            Some(v) => {
                let vm = Mat::<f64>::from_fn(n, 1, |i, _| v[i]);
                let dv = &d * &vm;
                let vdv: f64 = (0..n).map(|i| v[i] * dv[(i, 0)]).sum();
                let h = Mat::<f64>::from_fn(n, n, |i, j| {
                    d[(i, j)] - 2.0 * v[i] * dv[(j, 0)] - 2.0 * dv[(i, 0)] * v[j] + 4.0 * vdv * v[i] * v[j]
                });
                h.submatrix(0, 0, n - 1, n - 1).to_owned()
            }
            None => d.submatrix(0, 0, n - 1, n - 1).to_owned(),
        };
        let ev = reduced
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Solver(format!("eigensolver failed: {e:?}")))?;
        let max = ev.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let min = ev.iter().fold(f64::INFINITY, |a, x| a.min(x.abs()));
        ratio(max, min)
    } else {
        let opts = LanczosOptions::default();
        let mut fwd = |x: &[f64]| Ok(s.matvec(x));
        let lmax = largest_magnitude(n, &mut fwd, Some(&z), opts)?.abs();
        // (S restricted to z^perp)^{-1} through the bordered matrix [S z; z^T 0]
        let mut trips: Vec<(usize, usize, f64)> = s.triplets().collect();
        for (i, &zi) in z.iter().enumerate() {
            if zi != 0.0 {
                trips.push((i, n, zi));
                trips.push((n, i, zi));
            }
        }
        let bordered = SparseMatrix::from_triplets(n + 1, n + 1, trips);
        match LuFactor::new(&bordered) {
            Ok(lu) => {
                let mut inv = |x: &[f64]| {
                    let mut rhs = x.to_vec();
                    rhs.push(0.0);
                    let mut y = lu.solve(&rhs)?;
                    y.truncate(n);
                    Ok(y)
                };
                match largest_magnitude(n, &mut inv, Some(&z), opts) {
                    Ok(li) => lmax * li.abs(),
                    Err(Error::Singular { .. }) => f64::INFINITY,
                    Err(e) => return Err(e),
                }
            }
            Err(Error::Singular { .. }) => f64::INFINITY,
            Err(e) => return Err(e),
        }
    };
    let bordered = if with_bordered {
        Some(condition_number_with(&sys.matrix, method)?)
    } else {
        None
    };
    Ok(ConditionReport { deflated, bordered })
}
