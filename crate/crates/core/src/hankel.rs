//! Hankel operators `H_{ψ̄} f = ψ̄ f − P_α(ψ̄ f)` with anti-analytic symbol on
//! `A²_α(𝔻)`, worked entirely in Taylor coefficients.
//!
//! With `f = Σ a_n z^n` and `ψ = Σ_{k≥1} c_k z^k`,
//!
//! ```text
//! ‖H_{ψ̄} f‖²_α = Σ_{k≥1} Σ_{n,m≥0}   a_n ā_m c_{k+m} c̄_{k+n} D_{n+m+k}                      (I)
//!              + Σ_{k≥0} Σ_{n,m≥k+1} a_n ā_m c_{m−k} c̄_{n−k} (D_{n+m−k} − D_n D_m / D_k)  (II)
//! ```
//!
//! Symbols are polynomials, so every sum over `k` is finite.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::eigen::{dominant_eigenvalue, EigenOptions};
use crate::error::{Error, Result};
use crate::series::PowerSeries;
use crate::spaces::{dirichlet_energy, weighted_norm_sq, MonomialNorms, WeightParam};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Scalar multiplying `z^{n−k}` in `P_α(z̄^k z^n)`: `D_n / D_{n−k}` for
/// `k ≤ n`, zero otherwise.
pub fn projection_coefficient(k: usize, n: usize, alpha: WeightParam) -> f64 {
    if k > n {
        return 0.0;
    }
    let d = MonomialNorms::new(alpha, n);
    d[n] / d[n - k]
}

/// Validated symbol: zero constant term, and its degree.
fn symbol_degree(psi: &PowerSeries) -> Result<usize> {
    let c0 = psi.coeff(0);
    if c0 != ZERO {
        return Err(Error::NonzeroConstant(c0));
    }
    Ok(psi.degree().unwrap_or(0))
}

/// `‖H_{ψ̄} f‖²_α` from the coefficient sums (I) + (II).
pub fn hankel_norm_sq(f: &PowerSeries, psi: &PowerSeries, alpha: WeightParam) -> Result<f64> {
    let deg = symbol_degree(psi)?;
    if deg == 0 {
        return Ok(0.0);
    }
    let a = f.coeffs();
    let c = psi.coeffs();
    let n_max = f.order();
    let d = MonomialNorms::new(alpha, (2 * deg).max(n_max + deg));

    let mut first = ZERO;
    for k in 1..=deg {
        let top = (deg - k).min(n_max);
        for n in 0..=top {
            let an = a[n] * c[k + n].conj();
            for m in 0..=top {
                first += an * a[m].conj() * c[k + m] * d[n + m + k];
            }
        }
    }

    let mut second = ZERO;
    if !alpha.is_hardy() {
        for k in 0..n_max {
            let top = (k + deg).min(n_max);
            for n in k + 1..=top {
                let an = a[n] * c[n - k].conj();
                for m in k + 1..=top {
                    let bracket = d[n + m - k] - d[n] * d[m] / d[k];
                    second += an * a[m].conj() * c[m - k] * bracket;
                }
            }
        }
    }
    Ok((first + second).re.max(0.0))
}

/// Matrix entry `M[m][n]` of the form, so that `a* M a = ‖H_{ψ̄} f‖²_α`.
fn form_entry(c: &[Complex64], deg: usize, d: &MonomialNorms, m: usize, n: usize) -> Complex64 {
    let mut s = ZERO;
    let hi = m.max(n);
    let lo = m.min(n);
    for k in 1..=deg.saturating_sub(hi) {
        s += c[k + m] * c[k + n].conj() * d[n + m + k];
    }
    if !d.alpha().is_hardy() {
        for k in hi.saturating_sub(deg)..lo {
            s += c[m - k] * c[n - k].conj() * (d[n + m - k] - d[n] * d[m] / d[k]);
        }
    }
    s
}

/// The Hermitian matrix of `f ↦ ‖H_{ψ̄} f‖²_α` on a finite orthogonal family:
/// the monomials `1, z, ..., z^{dim−1}`, optionally followed by one extra
/// function supported on the higher monomials.
#[derive(Clone, Debug)]
pub struct HankelForm {
    symbol: PowerSeries,
    alpha: WeightParam,
    dim: usize,
    matrix: DMatrix<Complex64>,
    gram: Vec<f64>,
}

impl HankelForm {
    pub fn symbol(&self) -> &PowerSeries {
        &self.symbol
    }

    pub fn alpha(&self) -> WeightParam {
        self.alpha
    }

    /// Number of monomials in the compression space.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Squared norms of the basis functions (`D_n^α` for monomials).
    pub fn gram(&self) -> &[f64] {
        &self.gram
    }

    /// `a* M a` for a coefficient vector in the form's basis.
    pub fn quadratic_form(&self, a: &[Complex64]) -> f64 {
        let n = self.matrix.nrows();
        let mut s = ZERO;
        for i in 0..n {
            for j in 0..n {
                s += a[i].conj() * self.matrix[(i, j)] * a[j];
            }
        }
        s.re
    }

    /// `M̃[m][n] = M[m][n] / √(g_m g_n)`: the form in the orthonormalized basis.
    pub fn symmetrized(&self) -> DMatrix<Complex64> {
        let s: Vec<f64> = self.gram.iter().map(|g| 1.0 / g.sqrt()).collect();
        DMatrix::from_fn(self.matrix.nrows(), self.matrix.ncols(), |i, j| {
            self.matrix[(i, j)] * (s[i] * s[j])
        })
    }

    /// Adds `extra` (with its first `dim` coefficients removed) as one more
    /// basis direction. The removed part already lies in the monomial span,
    /// so the enlarged family stays orthogonal.
    pub fn with_extra_direction(&self, extra: &PowerSeries) -> Result<Self> {
        let deg = symbol_degree(&self.symbol)?;
        let dim = self.dim;
        let tail = PowerSeries::new(
            extra
                .coeffs()
                .iter()
                .enumerate()
                .map(|(i, &x)| if i < dim { ZERO } else { x })
                .collect(),
        );
        let tail_norm = weighted_norm_sq(&tail, self.alpha);
        if tail_norm == 0.0 {
            return Ok(self.clone());
        }
        let t = tail.coeffs();
        let d = MonomialNorms::new(self.alpha, (2 * deg).max(tail.order() + deg));
        let c = self.symbol.coeffs();
        let mut matrix = self.matrix.clone().resize(dim + 1, dim + 1, ZERO);
        for m in 0..dim {
            // Only coefficients with |n − m| < deg, or n < deg, couple to z^m.
            let hi = (m + deg).min(tail.order());
            let mut s = ZERO;
            for (n, &tn) in t.iter().enumerate().take(hi + 1).skip(dim) {
                s += form_entry(c, deg, &d, m, n) * tn;
            }
            matrix[(m, dim)] = s;
            matrix[(dim, m)] = s.conj();
        }
        matrix[(dim, dim)] = Complex64::new(hankel_norm_sq(&tail, &self.symbol, self.alpha)?, 0.0);
        let mut gram = self.gram.clone();
        gram.push(tail_norm);
        Ok(Self {
            symbol: self.symbol.clone(),
            alpha: self.alpha,
            dim,
            matrix,
            gram,
        })
    }
}

/// Matrix of the truncated quadratic form in the monomial basis `z^0..z^{dim−1}`.
pub fn build_form(psi: &PowerSeries, alpha: WeightParam, dim: usize) -> Result<HankelForm> {
    if dim == 0 {
        return Err(Error::InvalidArgument("form dimension must be at least 1".into()));
    }
    let deg = symbol_degree(psi)?;
    let symbol = psi.with_order(deg.max(1));
    let c = symbol.coeffs();
    let d = MonomialNorms::new(alpha, 2 * (dim + deg));
    let mut matrix = DMatrix::from_element(dim, dim, ZERO);
    if deg > 0 {
        for m in 0..dim {
            for n in m..dim {
                let e = form_entry(c, deg, &d, m, n);
                matrix[(m, n)] = e;
                matrix[(n, m)] = e.conj();
            }
        }
    }
    Ok(HankelForm {
        symbol,
        alpha,
        dim,
        matrix,
        gram: d.values()[..dim].to_vec(),
    })
}

/// Squared norm of the compressed operator: the top eigenvalue of the
/// symmetrized form.
pub fn operator_norm_sq(form: &HankelForm) -> Result<f64> {
    operator_norm_sq_with(form, EigenOptions::default())
}

/// [`operator_norm_sq`] with an explicit stop rule; `rel_residual = 0`
/// runs the Krylov space to full dimension.
pub fn operator_norm_sq_with(form: &HankelForm, opts: EigenOptions) -> Result<f64> {
    Ok(dominant_eigenvalue(&form.symmetrized(), opts)?.value)
}

/// `‖ψ'‖²_{A²(𝔻)} / (2 + α)`, the sharp bound for `‖H_{ψ̄}‖²`.
pub fn theorem_bound_sq(psi: &PowerSeries, alpha: WeightParam) -> f64 {
    dirichlet_energy(psi) / alpha.bound_denominator()
}

/// Pointwise value of `u = H_{ψ̄} f` at `z` in the open disk; `∂̄u = conj(ψ') f`.
pub fn evaluate_hankel(f: &PowerSeries, psi: &PowerSeries, alpha: WeightParam, z: Complex64) -> Result<Complex64> {
    if z.norm() >= 1.0 {
        return Err(Error::OutsideDisk(z));
    }
    let deg = symbol_degree(psi)?;
    let a = f.coeffs();
    let c = psi.coeffs();
    let n_max = f.order();
    let d = MonomialNorms::new(alpha, n_max);
    let product = psi.evaluate(z).conj() * f.evaluate(z);
    // Coefficients of the analytic projection P_α(ψ̄ f).
    let projected: Vec<Complex64> = (0..=n_max)
        .map(|k| {
            let top = (k + deg).min(n_max);
            (k + 1..=top).map(|n| a[n] * c[n - k].conj() * (d[n] / d[k])).sum()
        })
        .collect();
    Ok(product - PowerSeries::new(projected).evaluate(z))
}
