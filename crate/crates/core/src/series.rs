//! Truncated complex power series.
//!
//! A [`PowerSeries`] of truncation order `N` holds the Taylor coefficients of
//! `z^0 ..= z^N`. Binary operations truncate to the smaller of the two
//! operand orders; nothing grows the order implicitly. Callers that need more
//! terms (for example before taking a fractional power of a polynomial) pad
//! explicitly with [`PowerSeries::with_order`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<Complex64>,
}

impl PowerSeries {
    /// Builds a series from its coefficients; `coeffs[k]` multiplies `z^k`.
    /// An empty vector is read as the zero series of order 0.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(ZERO);
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![ZERO; order + 1],
        }
    }

    pub fn constant(value: Complex64, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = value;
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(ONE, order)
    }

    /// `z^k` at the given truncation order (zero if `k > order`).
    pub fn monomial(k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = ONE;
        }
        s
    }

    /// The coordinate function `z`.
    pub fn identity(order: usize) -> Self {
        Self::monomial(1, order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `z^k`; zero beyond the truncation order.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    /// Index of the last nonzero coefficient, `None` for the zero series.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| *c != ZERO)
    }

    /// Same series re-truncated (or zero-padded) to `order`.
    pub fn with_order(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, ZERO);
        Self { coeffs }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        Self {
            coeffs: (0..=order).map(|k| self.coeffs[k] + other.coeffs[k]).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        Self {
            coeffs: (0..=order).map(|k| self.coeffs[k] - other.coeffs[k]).collect(),
        }
    }

    /// Cauchy product truncated to the smaller order.
    pub fn multiply(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        // Loop over the nonzero terms of the sparser factor.
        let (sparse, dense) = if self.nonzero_count() <= other.nonzero_count() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = vec![ZERO; order + 1];
        for (i, &a) in sparse.coeffs.iter().enumerate().take(order + 1) {
            if a == ZERO {
                continue;
            }
            for (j, &b) in dense.coeffs.iter().enumerate().take(order + 1 - i) {
                out[i + j] += a * b;
            }
        }
        Self { coeffs: out }
    }

    /// Term-wise derivative; the order drops by one.
    pub fn derivative(&self) -> Result<Self> {
        if self.order() == 0 {
            return Err(Error::OrderTooLow { order: 0, required: 1 });
        }
        Ok(Self {
            coeffs: (1..=self.order()).map(|k| self.coeffs[k] * k as f64).collect(),
        })
    }

    /// Taylor coefficients of `self ∘ inner`, truncated to the smaller order.
    ///
    /// The inner series must vanish at the origin.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if inner.coeffs[0] != ZERO {
            return Err(Error::NonzeroConstant(inner.coeffs[0]));
        }
        let order = self.order().min(inner.order());
        let inner = inner.with_order(order);
        // Coefficients of the outer series above `order` cannot reach z^order.
        let top = self.degree().map_or(0, |d| d.min(order));
        let mut acc = Self::constant(self.coeffs[top], order);
        for k in (0..top).rev() {
            acc = acc.multiply(&inner);
            acc.coeffs[0] += self.coeffs[k];
        }
        Ok(acc)
    }

    /// Principal branch of `self^beta`, anchored at the constant term.
    ///
    /// Uses the recurrence from `p (p^β)' = β p' p^β`:
    /// `n p₀ g_n = Σ_{j=1..n} (β j − (n − j)) p_j g_{n−j}`.
    pub fn fractional_power(&self, beta: f64) -> Result<Self> {
        let p0 = self.coeffs[0];
        if p0 == ZERO {
            return Err(Error::ZeroConstant);
        }
        if beta == 0.0 {
            return Ok(Self::one(self.order()));
        }
        if beta == 1.0 {
            return Ok(self.clone());
        }
        let terms: Vec<(usize, Complex64)> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, c)| **c != ZERO)
            .map(|(j, c)| (j, *c))
            .collect();
        let mut g = vec![ZERO; self.coeffs.len()];
        g[0] = p0.powf(beta);
        for n in 1..g.len() {
            let mut s = ZERO;
            for &(j, pj) in &terms {
                if j > n {
                    break;
                }
                s += pj * g[n - j] * (beta * j as f64 - (n - j) as f64);
            }
            g[n] = s / (p0 * n as f64);
        }
        Ok(Self { coeffs: g })
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// Re-expansion about `center`: the series `w ↦ p(center + w)`.
    ///
    /// Exact for the truncated polynomial, so no convergence condition on
    /// `center` is needed.
    pub fn taylor_shift(&self, center: Complex64) -> Self {
        let mut c = self.coeffs.clone();
        if center == ZERO {
            return Self { coeffs: c };
        }
        // Repeated synthetic division by (z - center).
        let n = c.len();
        for i in 0..n {
            for k in (i..n - 1).rev() {
                let next = c[k + 1];
                c[k] += center * next;
            }
        }
        Self { coeffs: c }
    }

    fn nonzero_count(&self) -> usize {
        self.coeffs.iter().filter(|c| **c != ZERO).count()
    }
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if *c == ZERO {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(z^{})", self.order() + 1)
    }
}

impl Add for &PowerSeries {
    type Output = PowerSeries;
    fn add(self, rhs: Self) -> PowerSeries {
        PowerSeries::add(self, rhs)
    }
}

impl Sub for &PowerSeries {
    type Output = PowerSeries;
    fn sub(self, rhs: Self) -> PowerSeries {
        PowerSeries::sub(self, rhs)
    }
}

impl Mul for &PowerSeries {
    type Output = PowerSeries;
    fn mul(self, rhs: Self) -> PowerSeries {
        self.multiply(rhs)
    }
}

impl Neg for &PowerSeries {
    type Output = PowerSeries;
    fn neg(self) -> PowerSeries {
        self.scale(-ONE)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real(coeffs: &[f64]) -> PowerSeries {
        PowerSeries::from_real(coeffs)
    }

    /// Generalized binomial coefficient C(beta, k).
    fn binomial(beta: f64, k: usize) -> f64 {
        (0..k).fold(1.0, |acc, j| acc * (beta - j as f64) / (j as f64 + 1.0))
    }

    fn close(a: &PowerSeries, b: &PowerSeries, tol: f64) -> bool {
        a.order() == b.order()
            && a.coeffs()
                .iter()
                .zip(b.coeffs())
                .all(|(x, y)| (x - y).norm() <= tol * (1.0 + y.norm()))
    }

    #[test]
    fn add_examples() {
        assert_eq!(real(&[1.0, 1.0]).add(&real(&[1.0, -1.0])), real(&[2.0, 0.0]));
        let p = real(&[0.5, -2.0, 3.0]);
        assert_eq!(p.add(&PowerSeries::zero(2)), p);
        assert_eq!(
            real(&[0.0, 2.0, 1.0]).add(&real(&[0.0, 0.0, 1.0])),
            real(&[0.0, 2.0, 2.0])
        );
    }

    #[test]
    fn add_truncates_to_min_order() {
        let s = real(&[1.0, 1.0, 1.0]).add(&real(&[1.0]));
        assert_eq!(s, real(&[2.0]));
    }

    #[test]
    fn multiply_examples() {
        let one_plus_z = real(&[1.0, 1.0, 0.0]);
        assert_eq!(one_plus_z.multiply(&one_plus_z), real(&[1.0, 2.0, 1.0]));
        let p = real(&[3.0, -1.0, 4.0]);
        assert_eq!(p.multiply(&PowerSeries::one(2)), p);
        let q = real(&[0.0, 2.0, 1.0]);
        assert_eq!(q.multiply(&q), real(&[0.0, 0.0, 4.0]));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(real(&[0.0, 1.0]).derivative().unwrap(), real(&[1.0]));
        // (1+z)^2 - 1 = 2z + z^2
        assert_eq!(real(&[0.0, 2.0, 1.0]).derivative().unwrap(), real(&[2.0, 2.0]));
        assert_eq!(real(&[7.0, 0.0]).derivative().unwrap(), real(&[0.0]));
        assert!(matches!(real(&[7.0]).derivative(), Err(Error::OrderTooLow { .. })));
    }

    #[test]
    fn compose_examples() {
        let z2 = real(&[0.0, 0.0, 1.0]);
        assert_eq!(z2.compose(&real(&[0.0, 2.0, 0.0])).unwrap(), real(&[0.0, 0.0, 4.0]));
        let p = real(&[1.0, -2.0, 0.5, 3.0]);
        assert_eq!(p.compose(&PowerSeries::identity(3)).unwrap(), p);
        // (z+z²) + (z+z²)² expanded by hand.
        let q = real(&[0.0, 1.0, 1.0, 0.0, 0.0]);
        assert_eq!(q.compose(&q).unwrap(), real(&[0.0, 1.0, 2.0, 2.0, 1.0]));
    }

    #[test]
    fn compose_rejects_nonzero_inner_constant() {
        let err = real(&[0.0, 1.0]).compose(&real(&[1.0, 1.0])).unwrap_err();
        assert!(matches!(err, Error::NonzeroConstant(_)));
    }

    #[test]
    fn square_root_matches_binomial_series() {
        let p = real(&[2.0, 2.0]).with_order(8);
        let root = p.fractional_power(0.5).unwrap();
        for k in 0..=8 {
            let expected = 2f64.sqrt() * binomial(0.5, k);
            assert!((root.coeff(k) - c(expected, 0.0)).norm() < 1e-14, "k = {k}");
        }
        // First terms written out: √2 (1 + z/2 − z²/8 + z³/16).
        let s2 = 2f64.sqrt();
        for (k, v) in [1.0, 0.5, -0.125, 0.0625].iter().enumerate() {
            assert!((root.coeff(k).re - s2 * v).abs() < 1e-15);
        }
    }

    #[test]
    fn trivial_powers() {
        let p = PowerSeries::new(vec![c(1.0, 2.0), c(-0.5, 0.1), c(0.0, 3.0)]);
        assert_eq!(p.fractional_power(1.0).unwrap(), p);
        assert_eq!(p.fractional_power(0.0).unwrap(), PowerSeries::one(2));
        assert!(matches!(
            real(&[0.0, 1.0]).fractional_power(0.5),
            Err(Error::ZeroConstant)
        ));
    }

    #[test]
    fn general_power_agrees_with_integer_power() {
        let p = PowerSeries::new(vec![c(1.5, -0.5), c(0.3, 0.2), c(-0.1, 0.4)]).with_order(10);
        let cube = p.multiply(&p).multiply(&p);
        assert!(close(&p.fractional_power(3.0).unwrap(), &cube, 1e-13));
        let inv = p.fractional_power(-1.0).unwrap();
        assert!(close(&inv.multiply(&p), &PowerSeries::one(10), 1e-13));
    }

    #[test]
    fn evaluate_examples() {
        let q = real(&[0.0, 2.0, 1.0]);
        assert_eq!(q.evaluate(c(1.0, 0.0)), c(3.0, 0.0));
        assert_eq!(q.evaluate(c(0.0, 1.0)), c(-1.0, 2.0));
        let p = PowerSeries::new(vec![c(0.25, -1.0), c(9.0, 9.0)]);
        assert_eq!(p.evaluate(Complex64::new(0.0, 0.0)), c(0.25, -1.0));
    }

    #[test]
    fn taylor_shift_reexpands_polynomial() {
        // p(z) = z² shifted to 3: (3 + w)² = 9 + 6w + w².
        let shifted = real(&[0.0, 0.0, 1.0]).taylor_shift(c(3.0, 0.0));
        assert_eq!(shifted, real(&[9.0, 6.0, 1.0]));
        let p = PowerSeries::new(vec![c(1.0, 1.0), c(-2.0, 0.5), c(0.3, 0.0), c(0.0, 1.0)]);
        let a = c(0.4, -0.7);
        let s = p.taylor_shift(a);
        let w = c(0.1, 0.2);
        assert!((s.evaluate(w) - p.evaluate(a + w)).norm() < 1e-14);
    }

    #[test]
    fn degree_and_display() {
        assert_eq!(real(&[0.0, 1.0, 0.0]).degree(), Some(1));
        assert_eq!(PowerSeries::zero(3).degree(), None);
        assert_eq!(PowerSeries::zero(1).to_string(), "0 + O(z^2)");
    }

    fn series_strategy(order: usize) -> impl Strategy<Value = PowerSeries> {
        proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), order + 1)
            .prop_map(|v| PowerSeries::new(v.into_iter().map(|(a, b)| c(a, b)).collect()))
    }

    fn small_int_series(order: usize) -> impl Strategy<Value = PowerSeries> {
        proptest::collection::vec((-8i32..8, -8i32..8), order + 1)
            .prop_map(|v| PowerSeries::new(v.into_iter().map(|(a, b)| c(a as f64, b as f64)).collect()))
    }

    proptest! {
        #[test]
        fn add_is_an_abelian_group(p in small_int_series(6), q in small_int_series(6), r in small_int_series(6)) {
            prop_assert_eq!(p.add(&q), q.add(&p));
            prop_assert_eq!(p.add(&q).add(&r), p.add(&q.add(&r)));
            prop_assert_eq!(p.add(&(-&p)), PowerSeries::zero(6));
        }

        // Small integer coefficients keep every product exact in f64.
        #[test]
        fn multiply_commutes_and_associates(p in small_int_series(5), q in small_int_series(5), r in small_int_series(5)) {
            prop_assert_eq!(p.multiply(&q), q.multiply(&p));
            prop_assert_eq!(p.multiply(&q).multiply(&r), p.multiply(&q.multiply(&r)));
        }

        #[test]
        fn product_rule(p in small_int_series(7), q in small_int_series(7)) {
            let lhs = p.multiply(&q).derivative().unwrap();
            let rhs = p.derivative().unwrap().multiply(&q.with_order(6))
                .add(&p.with_order(6).multiply(&q.derivative().unwrap()));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn square_root_squares_back(p in series_strategy(12)) {
            prop_assume!(p.coeff(0).norm() > 0.5);
            let root = p.fractional_power(0.5).unwrap();
            let sq = root.multiply(&root);
            // Rounding in the Cauchy product scales with Σ |r_j| |r_{n-j}|.
            let r = root.coeffs();
            for n in 0..=p.order() {
                let scale: f64 = (0..=n).map(|j| r[j].norm() * r[n - j].norm()).sum();
                prop_assert!((sq.coeff(n) - p.coeff(n)).norm() <= 1e-12 * (1.0 + scale));
            }
        }

        #[test]
        fn identity_inner_is_exact(p in series_strategy(9), beta in -1.5f64..1.5) {
            prop_assume!(p.coeff(0).norm() > 0.1);
            let g = p.fractional_power(beta).unwrap();
            prop_assert_eq!(g.compose(&PowerSeries::identity(9)).unwrap(), g);
        }
    }
}
