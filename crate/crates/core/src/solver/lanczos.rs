//! Symmetric Lanczos with full reorthogonalisation for the eigenvalue of
//! largest magnitude.

use faer::{Mat, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::norm2;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub(crate) struct LanczosOptions {
    pub tol: f64,
    pub max_steps: usize,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            tol: 1e-4,
            max_steps: 1500,
            seed: 0x5eed,
        }
    }
}

fn project_out(w: &mut [f64], z: Option<&[f64]>) {
    if let Some(z) = z {
        let c: f64 = w.iter().zip(z).map(|(a, b)| a * b).sum();
        w.iter_mut().zip(z).for_each(|(a, b)| *a -= c * b);
    }
}

/// Eigenvalue of largest magnitude of the symmetric operator `op`,
/// restricted to the orthogonal complement of the unit vector `deflate`.
pub(crate) fn largest_magnitude(
    n: usize,
    op: &mut dyn FnMut(&[f64]) -> Result<Vec<f64>>,
    deflate: Option<&[f64]>,
    opts: LanczosOptions,
) -> Result<f64> {
    let dim = n - usize::from(deflate.is_some());
    if dim == 0 {
        return Err(Error::invalid("empty operator"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    project_out(&mut v, deflate);
    let nv = norm2(&v);
    v.iter_mut().for_each(|x| *x /= nv);

    let max_steps = opts.max_steps.min(dim);
    let mut basis: Vec<Vec<f64>> = vec![v];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut estimate = 0.0;
    for j in 0..max_steps {
        let vj = &basis[j];
        let mut w = op(vj)?;
        project_out(&mut w, deflate);
        let a: f64 = w.iter().zip(vj).map(|(x, y)| x * y).sum();
        for _ in 0..2 {
            for q in &basis {
                let c: f64 = w.iter().zip(q).map(|(x, y)| x * y).sum();
                w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
            project_out(&mut w, deflate);
        }
        alpha.push(a);
        let b = norm2(&w);
        let k = alpha.len();
        let check = k % 5 == 0 || k == max_steps || k <= 3 || b == 0.0;
        if check {
            let (theta, resid) = ritz_extreme(&alpha, &beta, b)?;
            estimate = theta;
            let invariant = b <= 1e-13 * theta.abs().max(f64::MIN_POSITIVE);
            if invariant || resid <= opts.tol * theta.abs() {
                return Ok(theta);
            }
        }
        if b == 0.0 {
            break;
        }
        beta.push(b);
        w.iter_mut().for_each(|x| *x /= b);
        basis.push(w);
    }
    Ok(estimate)
}

/// Ritz value of largest magnitude of the tridiagonal `(alpha, beta)` and its
/// residual bound `b_next |s_last|`.
fn ritz_extreme(alpha: &[f64], beta: &[f64], b_next: f64) -> Result<(f64, f64)> {
    let k = alpha.len();
    let t = Mat::<f64>::from_fn(k, k, |i, j| {
        if i == j {
            alpha[i]
        } else if i == j + 1 {
            beta[j]
        } else if j == i + 1 {
            beta[i]
        } else {
            0.0
        }
    });
    let eig = t
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Solver(format!("tridiagonal eigensolver failed: {e:?}")))?;
    let s = eig.S();
    let u = eig.U();
    let mut best = 0;
    for i in 0..k {
        if s[i].abs() > s[best].abs() {
            best = i;
        }
    }
    Ok((s[best], b_next * u[(k - 1, best)].abs()))
}
