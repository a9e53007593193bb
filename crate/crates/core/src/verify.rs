//! The property battery behind `hankel verify`.
//!
//! Every check is a named comparison with its measured value, the expected
//! value or bound, and the tolerance used.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{full_report, khavinson_lower_bound, rigidity, rigidity_lower_bound};
use crate::dirichlet::{solve, solve_polygon, torsional_rigidity_fd, Polygon};
use crate::domains::{mobius, norm_sq_of_one, perimeter, transport_symbol, ConformalDomain, Symbol};
use crate::eigen::EigenOptions;
use crate::error::{Error, Result};
use crate::hankel::{build_form, operator_norm_sq, operator_norm_sq_with, theorem_bound_sq};
use crate::series::PowerSeries;
use crate::spaces::{lemma_sum_check, WeightParam};

/// Weights exercised when no grid is given.
pub const DEFAULT_ALPHAS: [f64; 7] = [-1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0];

/// Centres of the Möbius maps used for the invariance check.
pub const MOBIUS_POINTS: [(f64, f64); 3] = [(0.3, 0.0), (0.0, 0.5), (-0.4, 0.2)];

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    /// `|value − expected| < tol`, absolute.
    pub fn abs(name: impl Into<String>, value: f64, expected: f64, tol: f64) -> Self {
        let error = (value - expected).abs();
        Self {
            name: name.into(),
            passed: error < tol,
            value: Some(value),
            expected: Some(expected),
            error: Some(error),
            tolerance: Some(tol),
            detail: None,
        }
    }

    /// `|value − expected| / |expected| < tol`.
    pub fn rel(name: impl Into<String>, value: f64, expected: f64, tol: f64) -> Self {
        let error = (value - expected).abs() / expected.abs();
        Self {
            passed: error < tol,
            error: Some(error),
            ..Self::abs(name, value, expected, tol)
        }
    }

    /// A condition with a free-form explanation.
    pub fn holds(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            value: None,
            expected: None,
            error: None,
            tolerance: None,
            detail: Some(detail.into()),
        }
    }

    fn failed(name: impl Into<String>, err: &Error) -> Self {
        Self::holds(name, false, err.to_string())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub passed: bool,
    pub total: usize,
    pub failed: Vec<String>,
    /// True when a failure came from a solver that did not converge.
    pub nonconvergent: bool,
    pub checks: Vec<Check>,
}

impl Summary {
    pub fn new(checks: Vec<Check>, nonconvergent: bool) -> Self {
        let failed: Vec<String> = checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
        Self {
            passed: failed.is_empty(),
            total: checks.len(),
            failed,
            nonconvergent,
            checks,
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub alphas: Vec<f64>,
    pub dim: usize,
    pub samples: usize,
    pub seed: u64,
    /// Random symbols for the sharp norm bound.
    pub symbols: usize,
    pub fd: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            alphas: DEFAULT_ALPHAS.to_vec(),
            dim: 64,
            samples: crate::domains::DEFAULT_SAMPLES,
            seed: 20_240_601,
            symbols: 200,
            fd: false,
        }
    }
}

/// Polynomial symbol `Σ_{k=1}^{d} c_k z^k` with `d ≤ max_degree` and
/// coefficients uniform in the square `[−1, 1]²`.
pub fn random_symbol(rng: &mut impl RngExt, max_degree: usize) -> PowerSeries {
    let degree = rng.random_range(1..=max_degree);
    let mut c = vec![Complex64::new(0.0, 0.0)];
    for _ in 0..degree {
        c.push(Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    }
    PowerSeries::new(c)
}

/// `z + Σ_{k=2}^{d} c_k z^k` with `Σ k |c_k| < 1`, which is univalent.
pub fn random_univalent_map(rng: &mut impl RngExt, max_degree: usize) -> PowerSeries {
    let degree = rng.random_range(2..=max_degree.max(2));
    let raw: Vec<Complex64> = (2..=degree)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let weight: f64 = raw.iter().enumerate().map(|(i, c)| (i + 2) as f64 * c.norm()).sum();
    let budget = rng.random_range(0.0..0.95);
    let scale = if weight > 0.0 { budget / weight } else { 0.0 };
    let mut c = vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
    c.extend(raw.iter().map(|x| x * scale));
    PowerSeries::new(c)
}

fn w(alpha: f64) -> Result<WeightParam> {
    WeightParam::new(alpha)
}

/// Collects checks, turning numerical errors into failed checks.
#[derive(Default)]
struct Battery {
    checks: Vec<Check>,
    nonconvergent: bool,
}

impl Battery {
    fn run(&mut self, name: &str, f: impl FnOnce() -> Result<Vec<Check>>) {
        match f() {
            Ok(c) => self.checks.extend(c),
            Err(e) => {
                self.nonconvergent |= matches!(e, Error::NonConvergent { .. });
                self.checks.push(Check::failed(name, &e));
            }
        }
    }
}

/// Sharpness: `‖H_{z̄}‖² = 1/(2+α)` at `dim = 1` and at `dim`.
pub fn sharpness_checks(alphas: &[f64], dim: usize) -> Result<Vec<Check>> {
    let z = PowerSeries::identity(1);
    let mut out = Vec::new();
    for &a in alphas {
        let exact = 1.0 / (2.0 + a);
        for d in [1, dim] {
            let v = operator_norm_sq(&build_form(&z, w(a)?, d)?)?;
            out.push(Check::abs(format!("sharpness alpha={a} dim={d}"), v, exact, 1e-10));
        }
    }
    Ok(out)
}

/// Sharp norm bound on random symbols: compression ≤ bound, nondecreasing in dim.
pub fn theorem_bound_checks(alphas: &[f64], count: usize, seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let symbols: Vec<PowerSeries> = (0..count).map(|_| random_symbol(&mut rng, 8)).collect();
    // Full Krylov runs so the comparison across dims sees only rounding.
    let exact = EigenOptions {
        rel_residual: 0.0,
        ..EigenOptions::default()
    };
    let mut out = Vec::new();
    for &a in alphas {
        let alpha = w(a)?;
        let (mut worst_ratio, mut monotone, mut bound_ok) = (0.0f64, true, true);
        let mut first_bad = None;
        for (i, psi) in symbols.iter().enumerate() {
            let bound = theorem_bound_sq(psi, alpha);
            let mut prev = 0.0;
            for d in [8, 16, 32, 64] {
                let v = operator_norm_sq_with(&build_form(psi, alpha, d)?, exact)?;
                if v < prev * (1.0 - 1e-13) {
                    monotone = false;
                    first_bad.get_or_insert(format!("symbol {i}: dim {d} gave {v:e} after {prev:e}"));
                }
                prev = v;
            }
            worst_ratio = worst_ratio.max(prev / bound);
            if prev > bound * (1.0 + 1e-9) {
                bound_ok = false;
                first_bad.get_or_insert(format!("symbol {i}: {prev:e} > bound {bound:e}"));
            }
        }
        out.push(Check {
            value: Some(worst_ratio),
            expected: Some(1.0),
            tolerance: Some(1e-9),
            ..Check::holds(
                format!("theorem bound alpha={a} ({count} symbols)"),
                bound_ok,
                first_bad.clone().unwrap_or_else(|| "largest norm/bound ratio".into()),
            )
        });
        out.push(Check::holds(
            format!("compression monotone in dim alpha={a}"),
            monotone,
            first_bad.unwrap_or_else(|| "dims 8, 16, 32, 64".into()),
        ));
    }
    Ok(out)
}

/// `Σ_{ℓ≤v} 1/D_ℓ = (v+1)/(2+α) / D_{v+1}` for `v ≤ 50`.
pub fn lemma_checks(alphas: &[f64]) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for &a in alphas {
        let mut worst = 0.0f64;
        for v in 0..=50 {
            let (l, r) = lemma_sum_check(w(a)?, v);
            worst = worst.max((l - r).abs() / r);
        }
        out.push(Check {
            value: Some(worst),
            error: Some(worst),
            tolerance: Some(1e-12),
            ..Check::holds(format!("summation lemma alpha={a}"), worst < 1e-12, "v = 0..=50")
        });
    }
    Ok(out)
}

/// Symbol transport by disk automorphisms leaves the norm unchanged.
pub fn mobius_checks(alphas: &[f64], dim: usize) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for &(re, im) in &MOBIUS_POINTS {
        let a = Complex64::new(re, im);
        let psi = transport_symbol(&Symbol::Coordinate, &mobius(a, 48)?)?;
        for &al in alphas {
            let disk = operator_norm_sq(&build_form(&PowerSeries::identity(1), w(al)?, dim)?)?;
            let moved = operator_norm_sq(&build_form(&psi, w(al)?, dim)?)?;
            out.push(Check::rel(format!("mobius a={a} alpha={al}"), moved, disk, 1e-5));
        }
    }
    Ok(out)
}

/// The inequality chain on fixed and random univalent domains.
pub fn chain_checks(alphas: &[f64], dim: usize, seed: u64, samples: usize) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let mut domains = vec![ConformalDomain::disk(), ConformalDomain::example1()];
    for (i, &(re, im)) in MOBIUS_POINTS.iter().enumerate() {
        domains.push(ConformalDomain::with_samples(
            format!("mobius{i}"),
            mobius(Complex64::new(re, im), 48)?,
            samples,
        )?);
    }
    for i in 0..6 {
        domains.push(ConformalDomain::with_samples(
            format!("random{i}"),
            random_univalent_map(&mut rng, 6),
            samples,
        )?);
    }
    let mut out = Vec::new();
    for d in &domains {
        for &a in alphas {
            let r = full_report(d, &Symbol::Coordinate, w(a)?, dim)?;
            let sharp_ok = r.commutator_norm <= r.upper_sharp + 1e-9 * (1.0 + r.upper_sharp);
            let ok = r.chain_ok() && sharp_ok;
            let detail = if ok {
                format!(
                    "{:.6e} <= {:.6e} <= {:.6e}",
                    r.lower_rigidity, r.commutator_norm, r.upper_sharp
                )
            } else {
                format!("failed: {:?}", r.failures())
            };
            out.push(Check::holds(format!("chain {} alpha={a}", d.id()), ok, detail));
        }
    }
    Ok(out)
}

/// On the disk the lower bound, compression and sharp bound coincide.
pub fn disk_saturation_checks(alphas: &[f64], dim: usize) -> Result<Vec<Check>> {
    let disk = ConformalDomain::disk();
    let mut out = Vec::new();
    for &a in alphas {
        let r = full_report(&disk, &Symbol::Coordinate, w(a)?, dim)?;
        let e = 1.0 / (2.0 + a);
        out.push(Check::abs(format!("disk lower alpha={a}"), r.lower_rigidity, e, 1e-9));
        out.push(Check::abs(
            format!("disk commutator alpha={a}"),
            r.commutator_norm,
            e,
            1e-9,
        ));
        out.push(Check::abs(format!("disk sharp alpha={a}"), r.upper_sharp, e, 1e-9));
    }
    let rho = PI * rigidity(&PowerSeries::identity(1), WeightParam::BERGMAN)?;
    out.push(Check::abs("disk rigidity (series)", rho, PI / 2.0, 1e-10));
    Ok(out)
}

/// The `2z + z²` numbers: perimeter, area, Khavinson and rigidity bounds.
pub fn example1_checks(samples: usize) -> Result<Vec<Check>> {
    let f = PowerSeries::from_real(&[0.0, 2.0, 1.0]);
    let per = perimeter(&f, samples)?;
    let area = crate::domains::area(&f)?;
    let khavinson = khavinson_lower_bound(&f)?;
    let lower = rigidity_lower_bound(&f, WeightParam::HARDY)?;
    Ok(vec![
        Check::rel("Per", per, 16.0, 1e-4),
        Check::abs("Area", area, 6.0 * PI, 1e-10),
        Check::abs("Khavinson", khavinson, 9.0 * PI * PI / 16.0, 1e-8),
        Check::abs("Rigidity", lower, 29.0 * PI / 16.0, 1e-8),
        Check {
            value: Some(lower - khavinson),
            ..Check::holds("Rigidity > Khavinson", lower > khavinson, "difference")
        },
    ])
}

/// Finite-difference cross-checks of the torsion problem.
pub fn fd_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let disk = ConformalDomain::disk();
    let g = solve(&disk, 0.005, 1e-8)?;
    out.push(Check::rel(
        "fd disk rigidity h=0.005",
        torsional_rigidity_fd(&g),
        PI / 2.0,
        0.02,
    ));

    let ex = ConformalDomain::example1();
    let poly = Polygon::from(&ex);
    let diam = poly.diameter();
    let g = solve_polygon(&poly, diam / 400.0, 1e-8)?;
    let series = PI * rigidity(ex.map(), WeightParam::BERGMAN)?;
    out.push(Check::rel(
        "fd example1 rigidity h=diam/400",
        torsional_rigidity_fd(&g),
        series,
        0.03,
    ));
    let dbar = g.dbar_link_error(0.05 * diam).unwrap_or(f64::INFINITY);
    out.push(Check::abs("fd example1 dbar link", dbar, 0.0, 0.05));

    let sq = solve_polygon(&Polygon::square(Complex64::new(0.0, 0.0), 1.0), 1.0 / 200.0, 1e-8)?;
    out.push(Check::rel(
        "fd unit square rigidity",
        torsional_rigidity_fd(&sq),
        square_torsion_constant(),
        0.02,
    ));
    Ok(out)
}

/// `1/3 − (64/π⁵) Σ_{n odd} tanh(nπ/2)/n⁵`, the unit square torsion constant.
pub fn square_torsion_constant() -> f64 {
    let s: f64 = (0..500)
        .map(|m| (2 * m + 1) as f64)
        .map(|n| (n * PI / 2.0).tanh() / n.powi(5))
        .sum();
    1.0 / 3.0 - 64.0 / PI.powi(5) * s
}

/// Normalization sanity: `‖1‖²` of the disk is one for every weight.
fn normalization_checks(alphas: &[f64]) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for &a in alphas {
        let n = norm_sq_of_one(&PowerSeries::identity(1), w(a)?)?;
        out.push(Check::abs(format!("disk norm of one alpha={a}"), n, 1.0, 1e-14));
    }
    Ok(out)
}

/// Runs the whole battery.
pub fn run(opts: &VerifyOptions) -> Summary {
    let mut b = Battery::default();
    let sharp_alphas = [-1.0, -0.5, 0.0, 1.0, 3.0];
    b.run("sharpness", || sharpness_checks(&sharp_alphas, opts.dim));
    b.run("theorem bound", || {
        theorem_bound_checks(&opts.alphas, opts.symbols, opts.seed)
    });
    b.run("summation lemma", || lemma_checks(&opts.alphas));
    b.run("mobius invariance", || mobius_checks(&[-1.0, 0.0, 1.0], 48));
    b.run("normalization", || normalization_checks(&opts.alphas));
    b.run("chain", || {
        chain_checks(&opts.alphas, opts.dim, opts.seed, opts.samples)
    });
    b.run("disk saturation", || disk_saturation_checks(&opts.alphas, opts.dim));
    b.run("example1", || example1_checks(opts.samples));
    if opts.fd {
        b.run("finite differences", fd_checks);
    }
    Summary::new(b.checks, b.nonconvergent)
}
