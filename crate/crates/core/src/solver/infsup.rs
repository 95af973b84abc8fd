//! Discrete inf-sup constant through norm whitening.

use faer::linalg::triangular_solve::solve_lower_triangular_in_place;
use faer::{Mat, Par, Side};

use crate::assembly::AssembledSystem;
use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// Largest dimension accepted by the dense inf-sup estimate.
pub const INFSUP_DENSE_LIMIT: usize = 6000;

/// Inf-sup constant of the unbordered system with respect to the block
/// norm `diag(norm_u, norm_p)`, over pressures satisfying the mean-value
/// constraint.
pub fn estimate_infsup(sys: &AssembledSystem, norm_u: &SparseMatrix, norm_p: &SparseMatrix) -> Result<f64> {
    let m = sys.unbordered();
    let (nu, np) = (sys.blocks.velocity.len(), sys.blocks.pressure.len());
    if norm_u.nrows != nu || norm_p.nrows != np {
        return Err(Error::invalid("norm matrices do not match the system blocks"));
    }
    let mut trips: Vec<(usize, usize, f64)> = norm_u.triplets().collect();
    trips.extend(norm_p.triplets().map(|(i, j, v)| (i + nu, j + nu, v)));
    let n = SparseMatrix::from_triplets(nu + np, nu + np, trips);
    let mut c = vec![0.0; nu];
    c.extend_from_slice(&sys.constraint);
    infsup_constant(&m, &n, Some(&c))
}

/// `min_x max_y (y^T M x) / (|x|_N |y|_N)`, with `x` restricted to
/// `c^T x = 0` when a constraint is given.
pub fn infsup_constant(m: &SparseMatrix, norm: &SparseMatrix, constraint: Option<&[f64]>) -> Result<f64> {
    let n = m.nrows;
    if m.ncols != n || norm.nrows != n || norm.ncols != n {
        return Err(Error::invalid("inf-sup needs square matrices of equal size"));
    }
    if n > INFSUP_DENSE_LIMIT {
        return Err(Error::invalid(format!(
            "inf-sup estimate is dense; dimension {n} exceeds {INFSUP_DENSE_LIMIT}"
        )));
    }
    let llt = norm
        .to_dense()
        .llt(Side::Lower)
        .map_err(|_| Error::invalid("norm matrix is not positive definite"))?;
    let l = llt.L();
    // G = L^{-1} M L^{-T}
    let mut x = m.to_dense();
    solve_lower_triangular_in_place(l, x.as_mut(), Par::Seq);
    let mut xt = x.transpose().to_owned();
    solve_lower_triangular_in_place(l, xt.as_mut(), Par::Seq);
    let g = xt.transpose().to_owned();

    let g = match constraint {
        None => g,
        Some(c) => {
            let mut d = Mat::<f64>::from_fn(n, 1, |i, _| c[i]);
            solve_lower_triangular_in_place(l, d.as_mut(), Par::Seq);
            let nd = (0..n).map(|i| d[(i, 0)] * d[(i, 0)]).sum::<f64>().sqrt();
            if nd == 0.0 {
                g
            } else {
                // Householder H with H e_last = d/|d|; columns 0..n-1 of H span d^perp
                let mut v: Vec<f64> = (0..n).map(|i| d[(i, 0)] / nd).collect();
                v[n - 1] -= 1.0;
                let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if nv < 1e-14 {
                    g.submatrix(0, 0, n, n - 1).to_owned()
                } else {
                    v.iter_mut().for_each(|x| *x /= nv);
                    let vm = Mat::<f64>::from_fn(n, 1, |i, _| v[i]);
                    let gv = &g * &vm;
                    let gh = Mat::<f64>::from_fn(n, n, |i, j| g[(i, j)] - 2.0 * gv[(i, 0)] * v[j]);
                    gh.submatrix(0, 0, n, n - 1).to_owned()
                }
            }
        }
    };
    let sv = g
        .singular_values()
        .map_err(|e| Error::Solver(format!("SVD failed: {e:?}")))?;
    Ok(*sv.last().unwrap_or(&0.0))
}
