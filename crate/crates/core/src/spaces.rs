//! Coefficient calculus of the weighted spaces `A²_α(𝔻)`.
//!
//! Monomials are orthogonal in every `A²_α(𝔻)`, with `‖z^n‖²_α = D_n^α`.
//! All norms use the normalized area measure `dA = dx dy / π`; at
//! `α = -1` the space is the Hardy space with arc length `|dz| / 2π`.

use std::ops::Index;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::PowerSeries;

/// The weight exponent `α ≥ -1` selecting `A²_α`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct WeightParam(f64);

impl WeightParam {
    pub const HARDY: Self = Self(-1.0);
    pub const BERGMAN: Self = Self(0.0);

    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha >= -1.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidWeight(alpha))
        }
    }

    pub fn alpha(self) -> f64 {
        self.0
    }

    pub fn is_hardy(self) -> bool {
        self.0 == -1.0
    }

    /// `2 + α`, the denominator of the sharp Hankel bound.
    pub fn bound_denominator(self) -> f64 {
        2.0 + self.0
    }
}

/// The squared monomial norms `D_0^α, ..., D_N^α`.
#[derive(Clone, Debug)]
pub struct MonomialNorms {
    alpha: WeightParam,
    values: Vec<f64>,
}

impl MonomialNorms {
    /// Built from `D_0 = 1`, `D_n = n / (n + α + 1) · D_{n-1}`.
    pub fn new(alpha: WeightParam, order: usize) -> Self {
        let a = alpha.alpha();
        let mut values = Vec::with_capacity(order + 1);
        values.push(1.0);
        for n in 1..=order {
            let nf = n as f64;
            values.push(values[n - 1] * (nf / (nf + a + 1.0)));
        }
        Self { alpha, values }
    }

    pub fn alpha(&self) -> WeightParam {
        self.alpha
    }

    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl Index<usize> for MonomialNorms {
    type Output = f64;
    fn index(&self, n: usize) -> &f64 {
        &self.values[n]
    }
}

pub fn monomial_norms(alpha: WeightParam, order: usize) -> MonomialNorms {
    MonomialNorms::new(alpha, order)
}

/// `‖f‖²_α = Σ |a_n|² D_n^α`.
pub fn weighted_norm_sq(f: &PowerSeries, alpha: WeightParam) -> f64 {
    let d = MonomialNorms::new(alpha, f.order());
    f.coeffs().iter().zip(d.values()).map(|(a, dn)| a.norm_sqr() * dn).sum()
}

/// The unweighted Bergman norm `‖ψ'‖²_{A²(𝔻)} = Σ_{m≥1} m |c_m|²`.
///
/// This is the numerator of the sharp bound for every `α`.
pub fn dirichlet_energy(psi: &PowerSeries) -> f64 {
    psi.coeffs()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(m, c)| m as f64 * c.norm_sqr())
        .sum()
}

/// Both sides of `Σ_{ℓ=0}^{v} 1/D_ℓ = (v+1)/(2+α) · 1/D_{v+1}`.
///
/// The left side sums reciprocals of the recurrence values; the right side
/// uses the product form `1/D_{v+1} = Π_{j=1}^{v+1} (j + α + 1)/j`.
pub fn lemma_sum_check(alpha: WeightParam, v: usize) -> (f64, f64) {
    let d = MonomialNorms::new(alpha, v);
    let lhs: f64 = d.values().iter().map(|x| 1.0 / x).sum();
    let a = alpha.alpha();
    let inv_d_next: f64 = (1..=v + 1).map(|j| (j as f64 + a + 1.0) / j as f64).product();
    let rhs = (v as f64 + 1.0) / alpha.bound_denominator() * inv_d_next;
    (lhs, rhs)
}
