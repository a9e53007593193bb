//! The inequality chain for `(Ω, ψ, α)`:
//! rigidity lower bound ≤ commutator norm ≤ sharp bound ≤ Putnam bound,
//! with the Khavinson and de St. Venant specializations.
//!
//! Everything is in the normalized convention `dA = dx dy / π` except
//! [`st_venant_check`], which reports physical units.

use std::f64::consts::PI;

use serde::Serialize;

use crate::domains::{
    converge_in_order, norm_sq_of_one, start_order, transport_function, transport_symbol, ConformalDomain, Symbol,
};
use crate::error::Result;
use crate::hankel::{build_form, hankel_norm_sq, operator_norm_sq, theorem_bound_sq};
use crate::series::PowerSeries;
use crate::spaces::{weighted_norm_sq, WeightParam};

/// Absolute tolerance of the stored chain flags.
pub const FLAG_TOL: f64 = 1e-7;

/// CSV header matching [`BoundReport::csv_row`].
pub const CSV_HEADER: &str = "domain,alpha,dim,lower_rigidity,commutator,upper_sharp,putnam,khavinson,chain_ok";

/// `(F')^{(2+α)/2}` at a truncation order where `‖·‖²_α` has converged.
fn transported_one(map: &PowerSeries, alpha: WeightParam) -> Result<PowerSeries> {
    let one = PowerSeries::one(0);
    let (_, order) = converge_in_order(start_order(map), "norm of the constant function", |order| {
        Ok(weighted_norm_sq(&transport_function(&one, map, alpha, order)?, alpha))
    })?;
    transport_function(&one, map, alpha, order)
}

/// `‖H_{ψ̄}‖²` compressed to `z^0..z^{dim−1}` together with the transported
/// constant function, so the value never falls below the rigidity quotient.
pub fn commutator_norm_sq(map: &PowerSeries, psi: &Symbol, alpha: WeightParam, dim: usize) -> Result<f64> {
    let symbol = transport_symbol(psi, map)?;
    let form = build_form(&symbol, alpha, dim)?;
    let g = transported_one(map, alpha)?;
    operator_norm_sq(&form.with_extra_direction(&g)?)
}

/// `‖H_{ψ̄} 1‖²_{A²_α(Ω)}`, computed on the disk.
pub fn hankel_norm_sq_of_one(map: &PowerSeries, psi: &Symbol, alpha: WeightParam) -> Result<f64> {
    let symbol = transport_symbol(psi, map)?;
    let one = PowerSeries::one(0);
    converge_in_order(start_order(map), "transported Hankel norm", |order| {
        hankel_norm_sq(&transport_function(&one, map, alpha, order)?, &symbol, alpha)
    })
    .map(|(v, _)| v)
}

/// Weighted torsional rigidity `ρ_{Ω,α} = ‖H_{z̄} 1‖²_α` (normalized units).
pub fn rigidity(map: &PowerSeries, alpha: WeightParam) -> Result<f64> {
    hankel_norm_sq_of_one(map, &Symbol::Coordinate, alpha)
}

/// `ρ_{Ω,α} / ‖1‖²_α`, a lower bound for the commutator norm.
pub fn rigidity_lower_bound(map: &PowerSeries, alpha: WeightParam) -> Result<f64> {
    Ok(rigidity(map, alpha)? / norm_sq_of_one(map, alpha)?)
}

/// `4 Area² / Per²`, with the perimeter from adaptive quadrature.
pub fn khavinson_lower_bound(map: &PowerSeries) -> Result<f64> {
    let a = crate::domains::area(map)?;
    let p = crate::domains::arc_length(map)?;
    Ok(4.0 * a * a / (p * p))
}

/// `Area(Ω) / π`.
pub fn putnam_bound(map: &PowerSeries) -> Result<f64> {
    Ok(crate::domains::area(map)? / PI)
}

/// Physical torsional rigidity `π ρ_Ω` and the de St. Venant bound `Area²/(2π)`.
pub fn st_venant_check(map: &PowerSeries) -> Result<(f64, f64)> {
    let rho = PI * rigidity(map, WeightParam::BERGMAN)?;
    let a = crate::domains::area(map)?;
    Ok((rho, a * a / (2.0 * PI)))
}

/// One named inequality of the chain.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainFlag {
    pub name: &'static str,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub domain_id: String,
    pub alpha: f64,
    pub dim: usize,
    pub lower_rigidity: f64,
    pub commutator_norm: f64,
    pub upper_sharp: f64,
    /// `Area/π`; reported for the coordinate symbol only.
    pub upper_putnam: Option<f64>,
    /// `4 Area²/Per²`; reported at `α = −1` for the coordinate symbol only.
    pub khavinson_lower: Option<f64>,
    pub flags: Vec<ChainFlag>,
}

impl BoundReport {
    pub fn chain_ok(&self) -> bool {
        self.flags.iter().all(|f| f.holds)
    }

    /// Names of the inequalities that failed.
    pub fn failures(&self) -> Vec<&'static str> {
        self.flags.iter().filter(|f| !f.holds).map(|f| f.name).collect()
    }

    /// One CSV row in [`CSV_HEADER`] order; absent values are empty fields.
    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(fmt_float).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{}",
            csv_field(&self.domain_id),
            fmt_float(self.alpha),
            self.dim,
            fmt_float(self.lower_rigidity),
            fmt_float(self.commutator_norm),
            fmt_float(self.upper_sharp),
            opt(self.upper_putnam),
            opt(self.khavinson_lower),
            self.chain_ok()
        )
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Every quantity of the chain for one `(Ω, ψ, α)`.
pub fn full_report(domain: &ConformalDomain, psi: &Symbol, alpha: WeightParam, dim: usize) -> Result<BoundReport> {
    let map = domain.map();
    let symbol = transport_symbol(psi, map)?;
    let lower = hankel_norm_sq_of_one(map, psi, alpha)? / norm_sq_of_one(map, alpha)?;
    let commutator = commutator_norm_sq(map, psi, alpha, dim)?;
    let sharp = theorem_bound_sq(&symbol, alpha);
    let coordinate = *psi == Symbol::Coordinate;
    let putnam = coordinate.then(|| domain.area() / PI);
    let khavinson = (coordinate && alpha.is_hardy()).then(|| {
        let (a, p) = (domain.area(), domain.arc_length());
        4.0 * a * a / (p * p)
    });

    let mut flags = vec![
        ChainFlag {
            name: "lower_rigidity <= commutator",
            holds: lower <= commutator + FLAG_TOL,
        },
        ChainFlag {
            name: "commutator <= upper_sharp",
            holds: commutator <= sharp + FLAG_TOL,
        },
    ];
    if let (Some(p), true) = (putnam, alpha == WeightParam::BERGMAN) {
        flags.push(ChainFlag {
            name: "upper_sharp <= putnam",
            holds: sharp <= p + FLAG_TOL,
        });
    }
    if let Some(k) = khavinson {
        flags.push(ChainFlag {
            name: "khavinson <= lower_rigidity",
            holds: k <= lower + FLAG_TOL,
        });
    }
    Ok(BoundReport {
        domain_id: domain.id().to_string(),
        alpha: alpha.alpha(),
        dim,
        lower_rigidity: lower,
        commutator_norm: commutator,
        upper_sharp: sharp,
        upper_putnam: putnam,
        khavinson_lower: khavinson,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn w(a: f64) -> WeightParam {
        WeightParam::new(a).unwrap()
    }

    fn example1() -> PowerSeries {
        PowerSeries::from_real(&[0.0, 2.0, 1.0])
    }

    fn z() -> PowerSeries {
        PowerSeries::identity(1)
    }

    #[test]
    fn commutator_examples() {
        let coord = Symbol::Coordinate;
        assert!((commutator_norm_sq(&z(), &coord, w(0.0), 64).unwrap() - 0.5).abs() < 1e-12);
        assert!((commutator_norm_sq(&z(), &coord, w(-1.0), 64).unwrap() - 1.0).abs() < 1e-12);
        let rho = rigidity(&example1(), w(0.0)).unwrap();
        let v = commutator_norm_sq(&example1(), &coord, w(0.0), 48).unwrap();
        assert!(v >= rho / 6.0 - 1e-12 && v <= 3.0 + 1e-12, "{v}");
    }

    #[test]
    fn rigidity_examples() {
        assert!((rigidity(&z(), w(0.0)).unwrap() - 0.5).abs() < 1e-15);
        assert!((rigidity(&example1(), w(-1.0)).unwrap() - 14.5).abs() < 1e-12);
        let r = 1.7;
        let scaled = z().scale(Complex64::new(r, 0.0));
        assert!((rigidity(&scaled, w(0.0)).unwrap() - r.powi(4) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn rigidity_lower_bound_examples() {
        assert!((rigidity_lower_bound(&z(), w(0.0)).unwrap() - 0.5).abs() < 1e-15);
        let hardy = rigidity_lower_bound(&example1(), w(-1.0)).unwrap();
        assert!((hardy - 29.0 * PI / 16.0).abs() < 1e-8, "{hardy}");
        let rho = rigidity(&example1(), w(0.0)).unwrap();
        assert!((rigidity_lower_bound(&example1(), w(0.0)).unwrap() - rho / 6.0).abs() < 1e-12);
    }

    #[test]
    fn khavinson_and_putnam_examples() {
        assert!((khavinson_lower_bound(&z()).unwrap() - 1.0).abs() < 1e-13);
        assert!((khavinson_lower_bound(&example1()).unwrap() - 9.0 * PI * PI / 16.0).abs() < 1e-8);
        let r = 3.0;
        let scaled = z().scale(Complex64::new(r, 0.0));
        assert!((khavinson_lower_bound(&scaled).unwrap() - r * r).abs() < 1e-12);
        assert!((putnam_bound(&z()).unwrap() - 1.0).abs() < 1e-15);
        assert!((putnam_bound(&example1()).unwrap() - 6.0).abs() < 1e-14);
        assert!((putnam_bound(&scaled).unwrap() - 9.0).abs() < 1e-13);
    }

    #[test]
    fn example1_rigidity_beats_khavinson() {
        let rho = rigidity_lower_bound(&example1(), w(-1.0)).unwrap();
        let k = khavinson_lower_bound(&example1()).unwrap();
        assert!(rho - k > 0.14, "{rho} vs {k}");
    }

    #[test]
    fn st_venant_examples() {
        let (rho, bound) = st_venant_check(&z()).unwrap();
        assert!((rho - PI / 2.0).abs() < 1e-14 && (bound - PI / 2.0).abs() < 1e-14);
        let (rho, bound) = st_venant_check(&example1()).unwrap();
        assert!((bound - 18.0 * PI).abs() < 1e-12);
        assert!(rho <= bound);
        let r = 0.6;
        let (rho, bound) = st_venant_check(&z().scale(Complex64::new(r, 0.0))).unwrap();
        let exact = PI * r.powi(4) / 2.0;
        assert!((rho - exact).abs() < 1e-14 && (bound - exact).abs() < 1e-14);
    }

    #[test]
    fn disk_report_saturates() {
        let disk = ConformalDomain::disk();
        for a in [-1.0, -0.5, 0.0, 0.5, 1.0, 2.0] {
            let r = full_report(&disk, &Symbol::Coordinate, w(a), 64).unwrap();
            let e = 1.0 / (2.0 + a);
            assert!((r.lower_rigidity - e).abs() < 1e-9);
            assert!((r.commutator_norm - e).abs() < 1e-9);
            assert!((r.upper_sharp - e).abs() < 1e-9);
            assert_eq!(r.upper_putnam, Some(1.0));
            assert!(r.chain_ok(), "{:?}", r.failures());
        }
    }

    #[test]
    fn example1_reports() {
        let d = ConformalDomain::example1();
        let r = full_report(&d, &Symbol::Coordinate, w(-1.0), 64).unwrap();
        let k = r.khavinson_lower.unwrap();
        assert!((k - 9.0 * PI * PI / 16.0).abs() < 1e-8);
        assert!((r.lower_rigidity - 29.0 * PI / 16.0).abs() < 1e-8);
        assert!(k < r.lower_rigidity);
        assert!(r.chain_ok(), "{:?}", r.failures());

        let r = full_report(&d, &Symbol::Coordinate, w(0.0), 64).unwrap();
        assert!(r.lower_rigidity <= r.commutator_norm + FLAG_TOL);
        assert!(r.commutator_norm <= 3.0 + FLAG_TOL);
        assert!((r.upper_sharp - 3.0).abs() < 1e-13);
        assert!((r.upper_putnam.unwrap() - 6.0).abs() < 1e-13);
        assert_eq!(r.khavinson_lower, None);
        assert!(r.chain_ok());
    }

    #[test]
    fn halving_at_bergman() {
        for f in [z(), example1(), PowerSeries::from_real(&[1.0, 1.0, 0.2, -0.1])] {
            let d = ConformalDomain::new("t", f).unwrap();
            let r = full_report(&d, &Symbol::Coordinate, w(0.0), 16).unwrap();
            assert!((r.upper_sharp - r.upper_putnam.unwrap() / 2.0).abs() <= 1e-14 * r.upper_sharp);
        }
    }

    #[test]
    fn csv_row_format() {
        let r = full_report(&ConformalDomain::disk(), &Symbol::Coordinate, w(0.0), 4).unwrap();
        let row = r.csv_row();
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), CSV_HEADER.split(',').count());
        assert_eq!(fields[0], "disk");
        assert_eq!(fields[1], "0.0000000000000000e0");
        assert_eq!(fields[2], "4");
        assert_eq!(fields[7], "");
        assert_eq!(fields[8], "true");
        assert_eq!(fields[3].parse::<f64>().unwrap(), r.lower_rigidity);
        assert_eq!(csv_field("a,b"), "\"a,b\"");
    }

    #[test]
    fn non_coordinate_symbol_omits_putnam() {
        let psi = Symbol::Series(PowerSeries::from_real(&[0.0, 0.0, 1.0]));
        let r = full_report(&ConformalDomain::disk(), &psi, w(0.0), 16).unwrap();
        assert_eq!(r.upper_putnam, None);
        // H_{z̄²} on the Bergman space has norm² bounded by ‖2z‖²/2 = 1.
        assert!(r.commutator_norm <= r.upper_sharp + 1e-12);
        assert!(r.chain_ok());
    }

    fn univalent_map() -> impl Strategy<Value = PowerSeries> {
        (
            proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..5),
            0.0f64..0.95,
            -1.0f64..1.0,
            -1.0f64..1.0,
        )
            .prop_map(|(v, budget, x0, y0)| {
                let raw: Vec<Complex64> = v.iter().map(|&(x, y)| Complex64::new(x, y)).collect();
                let weight: f64 = raw.iter().enumerate().map(|(i, c)| (i + 2) as f64 * c.norm()).sum();
                let s = if weight > 0.0 { budget / weight } else { 0.0 };
                let mut coeffs = vec![Complex64::new(x0, y0), Complex64::new(1.0, 0.0)];
                coeffs.extend(raw.iter().map(|c| c * s));
                PowerSeries::new(coeffs)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn chain_holds_for_univalent_maps(
            f in univalent_map(),
            alpha in prop::sample::select(vec![-1.0, -0.5, 0.0, 0.5, 1.0, 2.0]),
            dim in prop::sample::select(vec![4usize, 16, 32]),
        ) {
            let d = ConformalDomain::new("random", f).unwrap();
            let r = full_report(&d, &Symbol::Coordinate, w(alpha), dim).unwrap();
            prop_assert!(r.lower_rigidity <= r.commutator_norm + 1e-7);
            prop_assert!(r.commutator_norm <= r.upper_sharp + 1e-9 * (1.0 + r.upper_sharp));
            prop_assert!(r.chain_ok(), "{:?}", r.failures());
        }
    }
}
