//! Independent oracles: disk quadrature of the weighted measure and the
//! reproducing kernel, plus the series for the square's torsion constant.
//!
//! Nothing here touches the library's monomial-norm recurrence.

#![allow(dead_code)]

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

/// Tensor rule on the disk for `dA_α = (α+1)(1−|z|²)^α dx dy / π`:
/// Gauss-Legendre in `r`, trapezoid in `θ`. Exact for polynomials in
/// `z, z̄` of moderate degree when `α` is a nonnegative integer.
pub struct DiskQuadrature {
    points: Vec<Complex64>,
    weights: Vec<f64>,
}

impl DiskQuadrature {
    pub fn new(alpha: f64, n_r: usize, n_theta: usize) -> Self {
        let rule = GaussLegendre::new(NonZeroUsize::new(n_r).unwrap());
        let mut points = Vec::with_capacity(n_r * n_theta);
        let mut weights = Vec::with_capacity(n_r * n_theta);
        let dtheta = 2.0 * PI / n_theta as f64;
        for &(x, wx) in rule.as_node_weight_pairs() {
            // Map [-1, 1] to [0, 1].
            let r = 0.5 * (x + 1.0);
            let wr = 0.5 * wx * r * (alpha + 1.0) * (1.0 - r * r).powf(alpha);
            for j in 0..n_theta {
                points.push(Complex64::from_polar(r, j as f64 * dtheta));
                weights.push(wr * dtheta / PI);
            }
        }
        Self { points, weights }
    }

    pub fn integrate(&self, f: impl Fn(Complex64) -> Complex64) -> Complex64 {
        self.points.iter().zip(&self.weights).map(|(&z, &w)| f(z) * w).sum()
    }
}

/// `(1 − w z̄)^{−(2+α)}`, the reproducing kernel of `A²_α`.
pub fn kernel(alpha: f64, w: Complex64, z: Complex64) -> Complex64 {
    (Complex64::new(1.0, 0.0) - w * z.conj()).powf(-(2.0 + alpha))
}

/// `P_α g (w) = ∫ g(z) K(w, z) dA_α(z)`.
pub fn project_at(quad: &DiskQuadrature, alpha: f64, g: &impl Fn(Complex64) -> Complex64, w: Complex64) -> Complex64 {
    quad.integrate(|z| g(z) * kernel(alpha, w, z))
}

/// Taylor coefficients `0..count` of an analytic function from its values
/// on the circle `|w| = radius` (discrete Fourier transform, `m` nodes).
pub fn taylor_from_circle(f: impl Fn(Complex64) -> Complex64, radius: f64, m: usize, count: usize) -> Vec<Complex64> {
    let values: Vec<Complex64> = (0..m)
        .map(|j| f(Complex64::from_polar(radius, 2.0 * PI * j as f64 / m as f64)))
        .collect();
    (0..count)
        .map(|k| {
            let s: Complex64 = values
                .iter()
                .enumerate()
                .map(|(j, v)| v * Complex64::from_polar(1.0, -2.0 * PI * (j * k) as f64 / m as f64))
                .sum();
            s / (m as f64 * radius.powi(k as i32))
        })
        .collect()
}

pub fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &x| acc * z + x)
}

/// Torsion constant of the unit square, `1/3 − (64/π⁵) Σ_{n odd} tanh(nπ/2)/n⁵`.
pub fn square_torsion_series() -> f64 {
    let mut s = 0.0;
    let mut n = 1.0f64;
    while n < 2000.0 {
        s += (n * PI / 2.0).tanh() / n.powi(5);
        n += 2.0;
    }
    1.0 / 3.0 - 64.0 / PI.powi(5) * s
}

/// Centered-difference `∂̄ = (∂x + i ∂y)/2` of `u` at `p`.
pub fn dbar(u: impl Fn(Complex64) -> Complex64, p: Complex64, step: f64) -> Complex64 {
    let dx = (u(p + step) - u(p - step)) / (2.0 * step);
    let i = Complex64::i();
    let dy = (u(p + i * step) - u(p - i * step)) / (2.0 * step);
    (dx + i * dy) / 2.0
}
