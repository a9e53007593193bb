mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{dbar, horner, project_at, taylor_from_circle, DiskQuadrature};
use hankel_core::bounds::{full_report, rigidity};
use hankel_core::dirichlet::{solve, torsional_rigidity_fd};
use hankel_core::domains::{norm_sq_of_one, transport_function, transport_symbol, ConformalDomain, Symbol};
use hankel_core::hankel::{build_form, evaluate_hankel, hankel_norm_sq, operator_norm_sq};
use hankel_core::verify::random_univalent_map;
use hankel_core::{PowerSeries, WeightParam};

fn w(a: f64) -> WeightParam {
    WeightParam::new(a).unwrap()
}

fn random_coeffs(rng: &mut ChaCha8Rng, degree: usize) -> Vec<Complex64> {
    (0..=degree)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

#[test]
fn pointwise_hankel_matches_kernel_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for a in [0.0, 1.0] {
        let quad = DiskQuadrature::new(a, 48, 96);
        for _ in 0..4 {
            let mut psi = random_coeffs(&mut rng, 3);
            psi[0] = Complex64::new(0.0, 0.0);
            let f = random_coeffs(&mut rng, 4);
            let g = |z: Complex64| horner(&psi, z).conj() * horner(&f, z);
            for _ in 0..5 {
                // Keep |p| ≤ 1/2 so the kernel stays well resolved.
                let p = Complex64::from_polar(rng.random_range(0.0..0.5), rng.random_range(0.0..2.0 * PI));
                let oracle = g(p) - project_at(&quad, a, &g, p);
                let u = evaluate_hankel(&PowerSeries::new(f.clone()), &PowerSeries::new(psi.clone()), w(a), p).unwrap();
                assert!((u - oracle).norm() < 1e-10, "alpha={a} p={p}: {u} vs {oracle}");
            }
        }
    }
}

#[test]
fn dbar_of_general_symbol() {
    // ∂̄ H_{ψ̄} f = conj(ψ') f for any analytic ψ.
    let psi = PowerSeries::from_real(&[0.0, 1.0, -0.5, 0.25]);
    let f = PowerSeries::from_real(&[1.0, 2.0, 0.0, -1.0]);
    let dpsi = psi.derivative().unwrap();
    for a in [-1.0, 0.5, 2.0] {
        for k in 0..10 {
            let p = Complex64::from_polar(0.08 * k as f64, 0.7 * k as f64);
            let u = |q: Complex64| evaluate_hankel(&f, &psi, w(a), q).unwrap();
            let expected = dpsi.evaluate(p).conj() * f.evaluate(p);
            assert!((dbar(u, p, 1e-4) - expected).norm() < 1e-6);
        }
    }
}

#[test]
fn higher_degree_quadratic_form_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for a in [0.0, 1.0, 2.0] {
        let quad = DiskQuadrature::new(a, 64, 128);
        let mut psi = random_coeffs(&mut rng, 5);
        psi[0] = Complex64::new(0.0, 0.0);
        let f = random_coeffs(&mut rng, 6);
        let g = |z: Complex64| horner(&psi, z).conj() * horner(&f, z);
        let total = quad.integrate(|z| Complex64::new(g(z).norm_sqr(), 0.0)).re;
        let pg = taylor_from_circle(|p| project_at(&quad, a, &g, p), 0.5, 32, 10);
        let projected = quad.integrate(|z| Complex64::new(horner(&pg, z).norm_sqr(), 0.0)).re;
        let v = hankel_norm_sq(&PowerSeries::new(f), &PowerSeries::new(psi), w(a)).unwrap();
        let oracle = total - projected;
        assert!((v - oracle).abs() < 1e-8 * oracle, "alpha={a}: {v} vs {oracle}");
    }
}

#[test]
fn transported_isometry_at_bergman_weight() {
    // ‖f‖²_{A²(Ω)} = ∫_𝔻 |f∘F|² |F'|² dA; compare with the transported norm.
    let map = PowerSeries::from_real(&[0.2, 1.0, 0.25, -0.1]);
    let f = PowerSeries::from_real(&[1.0, -0.5, 0.3]);
    let quad = DiskQuadrature::new(0.0, 48, 96);
    let df = map.derivative().unwrap();
    let oracle = quad
        .integrate(|z| Complex64::new((f.evaluate(map.evaluate(z)) * df.evaluate(z)).norm_sqr(), 0.0))
        .re;
    let g = transport_function(&f, &map, WeightParam::BERGMAN, 20).unwrap();
    let v = hankel_core::spaces::weighted_norm_sq(&g, WeightParam::BERGMAN);
    assert!((v - oracle).abs() < 1e-12 * oracle, "{v} vs {oracle}");
}

#[test]
fn random_map_fd_matches_series() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..2 {
        let d = ConformalDomain::new(format!("random{i}"), random_univalent_map(&mut rng, 4)).unwrap();
        let series = PI * rigidity(d.map(), WeightParam::BERGMAN).unwrap();
        let g = solve(&d, 0.01, 1e-8).unwrap();
        let fd = torsional_rigidity_fd(&g);
        assert!((fd - series).abs() / series < 0.03, "{fd} vs {series}");
        let (_, bound) = hankel_core::bounds::st_venant_check(d.map()).unwrap();
        assert!(series <= bound);
    }
}

#[test]
fn commutator_never_exceeds_sharp_bound_on_transported_symbols() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..10 {
        let map = random_univalent_map(&mut rng, 5);
        let psi = Symbol::Series(PowerSeries::new({
            let mut c = random_coeffs(&mut rng, 2);
            c[0] = Complex64::new(0.0, 0.0);
            c
        }));
        let symbol = transport_symbol(&psi, &map).unwrap();
        for a in [-1.0, 0.0, 1.5] {
            let d = ConformalDomain::new("m", map.clone()).unwrap();
            let r = full_report(&d, &psi, w(a), 24).unwrap();
            assert!(r.chain_ok(), "{:?}", r.failures());
            let plain = operator_norm_sq(&build_form(&symbol, w(a), 24).unwrap()).unwrap();
            assert!(r.commutator_norm >= plain - 1e-12);
        }
    }
}

#[test]
fn norm_of_one_scales_like_area_at_bergman_weight() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..5 {
        let d = ConformalDomain::new("m", random_univalent_map(&mut rng, 6)).unwrap();
        let n = norm_sq_of_one(d.map(), WeightParam::BERGMAN).unwrap();
        assert!((n - d.area() / PI).abs() < 1e-12 * n);
    }
}
