//! Largest eigenvalue of a Hermitian positive semidefinite matrix.
//!
//! Lanczos iteration with full reorthogonalization from a fixed all-ones
//! start vector, so runs are reproducible. The Krylov space never exceeds
//! the matrix dimension; at full dimension the Ritz values are exact.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Stop rule for [`dominant_eigenvalue`].
#[derive(Clone, Copy, Debug)]
pub struct EigenOptions {
    /// Relative residual `‖A x − θ x‖ / |θ|` at which the iteration stops.
    pub rel_residual: f64,
    pub max_iterations: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            rel_residual: 1e-10,
            max_iterations: 100_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DominantEigen {
    pub value: f64,
    pub vector: DVector<Complex64>,
    pub residual: f64,
    pub iterations: usize,
}

pub fn dominant_eigenvalue(a: &DMatrix<Complex64>, opts: EigenOptions) -> Result<DominantEigen> {
    let n = a.nrows();
    if n == 0 || n != a.ncols() {
        return Err(Error::InvalidArgument(format!(
            "expected a nonempty square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let scale = a.iter().fold(0.0f64, |m, x| m.max(x.norm()));
    if scale == 0.0 {
        return Ok(DominantEigen {
            value: 0.0,
            vector: DVector::from_element(n, Complex64::new(1.0 / (n as f64).sqrt(), 0.0)),
            residual: 0.0,
            iterations: 0,
        });
    }

    let breakdown = 1e-14 * scale * n as f64;
    let limit = n.min(opts.max_iterations.max(1));
    let mut basis: Vec<DVector<Complex64>> = Vec::with_capacity(limit);
    let mut alphas: Vec<f64> = Vec::with_capacity(limit);
    let mut betas: Vec<f64> = Vec::with_capacity(limit);

    basis.push(DVector::from_element(n, Complex64::new(1.0 / (n as f64).sqrt(), 0.0)));
    let mut last = (0.0, DVector::zeros(1), f64::INFINITY);

    for j in 0..limit {
        let mut w = a * &basis[j];
        let alpha = basis[j].dotc(&w).re;
        alphas.push(alpha);
        // Two passes of classical Gram-Schmidt against the whole basis.
        for _ in 0..2 {
            for q in &basis {
                let proj = q.dotc(&w);
                w.axpy(-proj, q, Complex64::new(1.0, 0.0));
            }
        }
        let beta = w.norm();
        betas.push(beta);

        let steps = j + 1;
        let check = steps <= 32 || steps % 8 == 0 || steps == limit || beta <= breakdown;
        if check {
            let (theta, s) = top_ritz_pair(&alphas, &betas[..steps - 1]);
            let tail = s[steps - 1].abs();
            let residual = if theta.abs() > 0.0 {
                beta * tail / theta.abs()
            } else {
                f64::INFINITY
            };
            last = (theta, s, residual);
            if residual < opts.rel_residual || beta <= breakdown || steps == n {
                return finish(a, &basis, last, steps);
            }
        }
        if steps == limit {
            break;
        }
        basis.push(w.unscale(beta));
    }

    Err(Error::NonConvergent {
        what: "Lanczos iteration",
        iterations: basis.len(),
        residual: last.2,
    })
}

fn finish(
    a: &DMatrix<Complex64>,
    basis: &[DVector<Complex64>],
    (theta, s, _): (f64, DVector<f64>, f64),
    steps: usize,
) -> Result<DominantEigen> {
    let n = a.nrows();
    let mut x = DVector::<Complex64>::zeros(n);
    for (q, &coef) in basis.iter().zip(s.iter()).take(steps) {
        x.axpy(Complex64::new(coef, 0.0), q, Complex64::new(1.0, 0.0));
    }
    let norm = x.norm();
    if norm > 0.0 {
        x.unscale_mut(norm);
    }
    let r = a * &x - x.scale(theta);
    let residual = if theta.abs() > 0.0 {
        r.norm() / theta.abs()
    } else {
        r.norm()
    };
    Ok(DominantEigen {
        value: theta,
        vector: x,
        residual,
        iterations: steps,
    })
}

/// Largest eigenpair of the symmetric tridiagonal matrix with diagonal
/// `diag` and off-diagonal `off`.
fn top_ritz_pair(diag: &[f64], off: &[f64]) -> (f64, DVector<f64>) {
    let m = diag.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            diag[i]
        } else if i + 1 == j {
            off[i]
        } else if j + 1 == i {
            off[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let (idx, &theta) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty tridiagonal matrix");
    (theta, eig.eigenvectors.column(idx).into_owned())
}
