//! Closed forms checked against numerical integration.

mod common;

use std::f64::consts::PI;

use common::quadrature::{integrate, integrate_singular_01};
use qphase::analytics::{arcsine_cdf, arcsine_pdf, expected_prob0};

fn pdf(y: f64) -> f64 {
    arcsine_pdf(y).unwrap()
}

#[test]
fn pdf_integrates_to_one() {
    let total = integrate_singular_01(pdf, 1.0, 1e-12);
    assert!((total - 1.0).abs() < 1e-6, "{total}");
}

#[test]
fn cdf_matches_integrated_pdf() {
    for k in 1..100 {
        let y = k as f64 / 100.0;
        let numeric = integrate_singular_01(pdf, y, 1e-13);
        let closed = arcsine_cdf(y).unwrap();
        assert!((numeric - closed).abs() < 1e-8, "y={y}: {numeric} vs {closed}");
    }
}

#[test]
fn cdf_endpoints() {
    assert_eq!(arcsine_cdf(0.0).unwrap(), 0.0);
    assert!((arcsine_cdf(1.0).unwrap() - 1.0).abs() < 1e-15);
    assert!((arcsine_cdf(0.5).unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn pdf_mean_is_one_half() {
    let mean = integrate_singular_01(|y| y * pdf(y), 1.0, 1e-12);
    assert!((mean - 0.5).abs() < 1e-8, "{mean}");
    assert_eq!(expected_prob0(), 0.5);
}

#[test]
fn phase_average_of_interference_is_one_half() {
    for hi in [PI, 2.0 * PI] {
        let mean = integrate(|t| 0.5 * (1.0 + t.cos()), 0.0, hi, 1e-13) / hi;
        assert!((mean - expected_prob0()).abs() < 1e-12, "hi={hi}: {mean}");
    }
}

#[test]
fn pushforward_of_uniform_phase_is_arcsine() {
    // P(Y <= y) for Y = ½(1 + cos θ), θ ~ U(0, π), by integrating the
    // indicator's boundary: Y <= y  ⇔  θ >= acos(2y − 1).
    for k in 1..20 {
        let y = k as f64 / 20.0;
        let boundary = integrate(|t| if 0.5 * (1.0 + t.cos()) <= y { 1.0 } else { 0.0 }, 0.0, PI, 1e-10) / PI;
        assert!((boundary - arcsine_cdf(y).unwrap()).abs() < 1e-6, "y={y}");
    }
}
