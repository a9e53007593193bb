//! Simply connected domains `Ω = F(𝔻)` given by a univalent power series
//! `F: 𝔻 → Ω`, their geometry, and the transport of symbols and functions
//! from `Ω` back to the disk.
//!
//! Only `F` is ever stored; the Riemann map `Ω → 𝔻` is never inverted.

use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::path::Path;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::series::PowerSeries;
use crate::spaces::{weighted_norm_sq, WeightParam};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Default number of uniform boundary nodes.
pub const DEFAULT_SAMPLES: usize = 4096;

/// Truncation schedule for series whose exact transport is infinite.
const START_ORDER: usize = 64;
const MAX_ORDER: usize = 1 << 20;
const CONVERGED: f64 = 1e-12;
const ACCEPTABLE: f64 = 1e-8;

/// A symbol on the domain, written in the domain variable `w`.
#[derive(Clone, Debug, PartialEq)]
pub enum Symbol {
    /// `ψ(w) = w`.
    Coordinate,
    /// A polynomial in `w`, expanded about the origin.
    Series(PowerSeries),
}

/// `Ω = F(𝔻)` with cached boundary samples and geometry.
#[derive(Clone, Debug)]
pub struct ConformalDomain {
    id: String,
    map: PowerSeries,
    samples: usize,
    boundary: Vec<Complex64>,
    area: f64,
    perimeter: f64,
    arc_length: f64,
}

impl ConformalDomain {
    /// Domain with the default `4096` boundary samples.
    pub fn new(id: impl Into<String>, map: PowerSeries) -> Result<Self> {
        Self::with_samples(id, map, DEFAULT_SAMPLES)
    }

    pub fn with_samples(id: impl Into<String>, map: PowerSeries, samples: usize) -> Result<Self> {
        let area = area(&map)?;
        let perimeter = perimeter(&map, samples)?;
        let arc_length = arc_length(&map)?;
        let boundary = (0..samples)
            .map(|j| map.evaluate(Complex64::from_polar(1.0, 2.0 * PI * j as f64 / samples as f64)))
            .collect();
        Ok(Self {
            id: id.into(),
            map,
            samples,
            boundary,
            area,
            perimeter,
            arc_length,
        })
    }

    /// The unit disk, `F(z) = z`.
    pub fn disk() -> Self {
        Self::new("disk", PowerSeries::identity(1)).expect("identity map is valid")
    }

    /// The cardioid-like domain `F(z) = 2z + z²`, with a cusp at `F(−1) = −1`.
    pub fn example1() -> Self {
        Self::new("example1", PowerSeries::from_real(&[0.0, 2.0, 1.0])).expect("2z + z² is valid")
    }

    /// Builtin name (`disk`, `example1`) or coefficient file path.
    pub fn from_spec(spec: &str, samples: usize) -> Result<Self> {
        match spec {
            "disk" => Self::with_samples("disk", PowerSeries::identity(1), samples),
            "example1" => Self::with_samples("example1", PowerSeries::from_real(&[0.0, 2.0, 1.0]), samples),
            path => Self::from_file(path, samples),
        }
    }

    /// Reads `F` from a coefficient file; the id is the file stem.
    pub fn from_file(path: impl AsRef<Path>, samples: usize) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "domain".into());
        Self::with_samples(id, parse_coefficients(&text)?, samples)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn map(&self) -> &PowerSeries {
        &self.map
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    /// `F(e^{iθ_j})` at the uniform nodes `θ_j = 2πj/M`.
    pub fn boundary_samples(&self) -> &[Complex64] {
        &self.boundary
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    /// Trapezoid perimeter on the boundary nodes.
    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    /// Perimeter by adaptive Gauss-Legendre quadrature, accurate near
    /// boundary cusps where the trapezoid rule loses its spectral accuracy.
    pub fn arc_length(&self) -> f64 {
        self.arc_length
    }
}

fn check_map(f: &PowerSeries) -> Result<()> {
    if f.coeff(1) == ZERO {
        Err(Error::DegenerateMap)
    } else {
        Ok(())
    }
}

/// `Area(F(𝔻)) = π Σ n |c_n|²`.
pub fn area(f: &PowerSeries) -> Result<f64> {
    check_map(f)?;
    Ok(PI * crate::spaces::dirichlet_energy(f))
}

/// Trapezoid rule for `∫₀^{2π} |F'(e^{iθ})| dθ` on `samples` uniform nodes.
pub fn perimeter(f: &PowerSeries, samples: usize) -> Result<f64> {
    if samples < 16 {
        return Err(Error::InvalidArgument(format!(
            "need at least 16 boundary samples, got {samples}"
        )));
    }
    let df = derivative_or_zero(f);
    let h = 2.0 * PI / samples as f64;
    let sum: f64 = (0..samples)
        .map(|j| df.evaluate(Complex64::from_polar(1.0, h * j as f64)).norm())
        .sum();
    Ok(h * sum)
}

/// `∫₀^{2π} |F'(e^{iθ})| dθ` by adaptive 16-point Gauss-Legendre panels.
pub fn arc_length(f: &PowerSeries) -> Result<f64> {
    check_map(f)?;
    let df = derivative_or_zero(f);
    let rule = GaussLegendre::new(NonZeroUsize::new(16).unwrap());
    let speed = |t: f64| df.evaluate(Complex64::from_polar(1.0, t)).norm();
    let panels = 64;
    let h = 2.0 * PI / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let (a, b) = (p as f64 * h, (p + 1) as f64 * h);
        let whole = rule.integrate(a, b, speed);
        total += refine(&rule, &speed, a, b, whole, 1e-15, 0);
    }
    Ok(total)
}

fn refine(rule: &GaussLegendre, f: &impl Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let left = rule.integrate(a, m, f);
    let right = rule.integrate(m, b, f);
    if (left + right - whole).abs() <= tol || depth >= 40 {
        return left + right;
    }
    refine(rule, f, a, m, left, tol / 2.0, depth + 1) + refine(rule, f, m, b, right, tol / 2.0, depth + 1)
}

fn derivative_or_zero(f: &PowerSeries) -> PowerSeries {
    f.derivative().unwrap_or_else(|_| PowerSeries::zero(0))
}

/// `ψ∘F − ψ(F(0))`, the symbol seen from the disk.
///
/// Polynomial compositions are carried to full degree, so the result is exact.
pub fn transport_symbol(psi: &Symbol, f: &PowerSeries) -> Result<PowerSeries> {
    check_map(f)?;
    let center = f.coeff(0);
    let mut g = f.clone();
    g.coeffs_mut()[0] = ZERO;
    match psi {
        Symbol::Coordinate => Ok(g),
        Symbol::Series(p) => {
            let deg_p = p.degree().unwrap_or(0);
            let deg_f = f.degree().unwrap_or(1);
            let order = f.order().max(deg_p * deg_f).max(1);
            let shifted = p.taylor_shift(center).with_order(order);
            let mut out = shifted.compose(&g.with_order(order))?;
            out.coeffs_mut()[0] = ZERO;
            Ok(out)
        }
    }
}

/// `g = (F')^{(2+α)/2} · (f∘F)` truncated at `order`, the image of `f` under
/// the isometry `A²_α(Ω) → A²_α(𝔻)`.
///
/// `f` is a polynomial in the domain variable expanded about the origin.
pub fn transport_function(f: &PowerSeries, map: &PowerSeries, alpha: WeightParam, order: usize) -> Result<PowerSeries> {
    check_map(map)?;
    let density = map
        .with_order(order + 1)
        .derivative()?
        .fractional_power(alpha.bound_denominator() / 2.0)?;
    if f.degree().unwrap_or(0) == 0 {
        return Ok(density.scale(f.coeff(0)));
    }
    let mut g = map.with_order(order);
    let center = g.coeff(0);
    g.coeffs_mut()[0] = ZERO;
    let composed = f.taylor_shift(center).with_order(order).compose(&g)?;
    Ok(density.multiply(&composed))
}

/// `‖1‖²_{A²_α(Ω)}`, the weighted disk norm of `(F')^{(2+α)/2}`.
pub fn norm_sq_of_one(f: &PowerSeries, alpha: WeightParam) -> Result<f64> {
    let one = PowerSeries::one(0);
    converge_in_order(start_order(f), "norm of the constant function", |order| {
        Ok(weighted_norm_sq(&transport_function(&one, f, alpha, order)?, alpha))
    })
    .map(|(v, _)| v)
}

pub(crate) fn start_order(f: &PowerSeries) -> usize {
    START_ORDER.max(4 * f.degree().unwrap_or(1))
}

/// Evaluates `eval` at doubling truncation orders until two consecutive
/// values agree to `1e−12` relative. Returns the value and the order used.
///
/// At the cap the last change must still be below `1e−8`.
pub(crate) fn converge_in_order(
    start: usize,
    what: &'static str,
    mut eval: impl FnMut(usize) -> Result<f64>,
) -> Result<(f64, usize)> {
    let mut order = start.max(1);
    let mut prev = eval(order)?;
    loop {
        order *= 2;
        let cur = eval(order)?;
        let diff = (cur - prev).abs();
        let rel = if cur == 0.0 { diff } else { diff / cur.abs() };
        if rel < CONVERGED {
            return Ok((cur, order));
        }
        if order >= MAX_ORDER {
            if rel < ACCEPTABLE {
                return Ok((cur, order));
            }
            return Err(Error::NonConvergent {
                what,
                iterations: order,
                residual: rel,
            });
        }
        prev = cur;
    }
}

/// The disk automorphism `F_a(z) = (a − z)/(1 − āz)` expanded to `order`.
pub fn mobius(a: Complex64, order: usize) -> Result<PowerSeries> {
    if a.norm() >= 1.0 {
        return Err(Error::OutsideDisk(a));
    }
    let mut c = vec![ZERO; order.max(1) + 1];
    c[0] = a;
    let s = 1.0 - a.norm_sqr();
    let mut p = Complex64::new(1.0, 0.0);
    for coef in c.iter_mut().skip(1) {
        *coef = -s * p;
        p *= a.conj();
    }
    Ok(PowerSeries::new(c))
}

/// Parses `re im` pairs, one per line; line `k` of data is the `z^k`
/// coefficient. `#` starts a comment; blank lines are skipped. A lone
/// number is read as a real coefficient.
pub fn parse_coefficients(text: &str) -> Result<PowerSeries> {
    let points = parse_complex_lines(text)?;
    if points.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no coefficients found".into(),
        });
    }
    Ok(PowerSeries::new(points))
}

pub(crate) fn parse_complex_lines(text: &str) -> Result<Vec<Complex64>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { line: i + 1, message };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(format!("not a finite number: {s:?}")))
        };
        let z = match fields.as_slice() {
            [re] => Complex64::new(num(re)?, 0.0),
            [re, im] => Complex64::new(num(re)?, num(im)?),
            _ => return Err(err(format!("expected `re im`, found {} fields", fields.len()))),
        };
        out.push(z);
    }
    Ok(out)
}
