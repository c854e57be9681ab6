use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use shearkit_core::field::{fft_forward, fft_inverse, spectral_derivative, spectral_field, Grid2D, SampledField2D};
use shearkit_core::generator::default_generator;
use shearkit_core::lizorkin::*;
use shearkit_core::ShearError;

fn gaussian(n: usize, hw: f64) -> SampledField2D {
    fields::gaussian(Grid2D::centered(n, hw).unwrap(), [0.0, 0.0], 1.0)
}

fn meyer(n: usize, hw: f64) -> SampledField2D {
    let gen = default_generator();
    spectral_field(Grid2D::centered(n, hw).unwrap(), |xi| gen.value(xi))
}

fn packet() -> SampledField2D {
    fields::wave_packet(Grid2D::centered(128, 12.0).unwrap(), [1.0, 0.5], 3.0, 3, [0.2, -0.1])
}

#[test]
fn fourier_convention() {
    // spacing 1/8 puts the aliasing floor far below the tolerance
    let f = gaussian(64, 4.0);
    let spec = fft_forward(&f).unwrap();
    let err = spec
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let xi = spec.grid.point(i);
            (v - (-PI * (xi[0] * xi[0] + xi[1] * xi[1])).exp()).norm()
        })
        .fold(0.0, f64::max);
    assert!(err <= 1e-8, "{err}");
    assert!((spec.norm_l2() - f.norm_l2()).abs() <= 1e-12 * f.norm_l2());
    assert!(fft_inverse(&spec).unwrap().sub(&f).unwrap().sup() <= 1e-12);
    let zero = SampledField2D::zeros(f.grid);
    assert_eq!(fft_forward(&zero).unwrap().sup(), 0.0);
}

#[test]
fn seminorm_examples() {
    let f = gaussian(64, 8.0);
    assert!((schwartz_seminorm(&f, 0).unwrap() - 1.0).abs() <= 1e-10);
    let p = packet();
    assert_eq!(schwartz_seminorm(&p, 0).unwrap(), p.sup());
    assert!(matches!(schwartz_seminorm(&f, 11), Err(ShearError::OrderTooHigh { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn seminorms_are_monotone(c1 in -2.0..2.0f64, c2 in -2.0..2.0f64, w in 0.8..2.0f64, nu in 0usize..5) {
        let f = fields::gaussian(Grid2D::centered(32, 8.0).unwrap(), [c1, c2], w);
        prop_assert!(schwartz_seminorm(&f, nu).unwrap() <= schwartz_seminorm(&f, nu + 1).unwrap());
    }

    #[test]
    fn even_fields_have_no_odd_first_moment(w in 0.8..2.0f64) {
        let f = fields::gaussian(Grid2D::centered(32, 8.0).unwrap(), [0.0, 0.0], w);
        let r = moments(&f, 1).unwrap();
        prop_assert!(r.get(MultiIndex::new(1, 0)).norm() <= 1e-12);
    }
}

#[test]
fn moment_examples() {
    let r = moments(&gaussian(64, 8.0), 4).unwrap();
    assert!((r.get(MultiIndex::new(0, 0)) - 1.0).norm() <= 1e-8);
    // ∫x² e^{-πx²} dx = 1/(2π)
    assert!((r.get(MultiIndex::new(2, 0)) - 1.0 / (2.0 * PI)).norm() <= 1e-8);
    assert!(moments(&meyer(128, 12.0), 6).unwrap().max_abs <= 1e-8);
    assert_eq!(moments(&SampledField2D::zeros(Grid2D::centered(16, 4.0).unwrap()), 3).unwrap().max_abs, 0.0);
}

#[test]
fn directional_moment_examples() {
    let psi = meyer(128, 12.0);
    let d = directional_moments(&psi, 1, 6).unwrap();
    assert!(d.iter().all(|v| *v <= 1e-8), "{d:?}");
    // lines along x2 integrate to the band profile w(|ξ1|), which is not zero
    let d = directional_moments(&psi, 2, 0).unwrap();
    assert!(d[0] > 0.1, "{d:?}");
    let d = directional_moments(&gaussian(64, 8.0), 1, 2).unwrap();
    assert!((d[0] - 1.0).abs() <= 1e-8 && d[1] <= 1e-10);
    let zero = SampledField2D::zeros(Grid2D::centered(16, 4.0).unwrap());
    assert!(directional_moments(&zero, 2, 3).unwrap().iter().all(|v| *v == 0.0));
    assert!(directional_moments(&zero, 3, 3).is_err());
}

#[test]
fn warps_are_identity_at_the_neutral_element() {
    let f = packet();
    assert!(translate(&f, [0.0, 0.0]).unwrap().field.sub(&f).unwrap().sup() <= 1e-12);
    assert!(dilate(&f, 1.0).unwrap().field.sub(&f).unwrap().sup() <= 1e-12);
    assert_eq!(dilate(&f, 0.0).unwrap_err(), ShearError::ZeroDilation);
}

#[test]
fn lizorkin_space_is_closed() {
    let f = packet();
    assert!(moments(&f, 6).unwrap().max_abs <= 1e-8);
    let t = translate(&f, [0.6, -0.9]).unwrap();
    assert!(!t.support_escape);
    let d = dilate(&f, 1.3).unwrap();
    assert!(!d.support_escape);
    assert!((d.field.norm_l2() - f.norm_l2()).abs() <= 1e-10 * f.norm_l2());
    let derived = [
        t.field,
        d.field,
        spectral_derivative(&f, [1, 1]),
        multiply_by_coordinate(&f, 1).unwrap(),
        multiply_by_coordinate(&f, 2).unwrap(),
    ];
    for g in &derived {
        let r = moments(g, 6).unwrap();
        assert!(r.max_abs <= 1e-6, "{}", r.max_abs);
    }
}

#[test]
fn spectral_derivative_matches_central_difference() {
    let f = fields::gaussian(Grid2D::centered(512, 12.0).unwrap(), [0.3, -0.4], 4.5);
    let g = f.grid;
    let h = g.spacing[0];
    let d = spectral_derivative(&f, [1, 0]);
    let mut err: f64 = 0.0;
    for i2 in 0..g.n2 {
        for i1 in 1..g.n1 - 1 {
            let fd = (f.at(i1 + 1, i2) - f.at(i1 - 1, i2)) / (2.0 * h);
            err = err.max((fd - d.at(i1, i2)).norm());
        }
    }
    assert!(err <= 1e-4, "{err}");
}

#[test]
fn antiderivative_of_meyer_shearlet() {
    let psi = meyer(128, 12.0);
    let out = antiderivative_oracle(&psi, MultiIndex::new(1, 0)).unwrap();
    assert!(moments(&out.g, 6).unwrap().max_abs <= 1e-8);
    assert!(out.seminorm_ratio.is_finite() && out.seminorm_ratio > 0.0);

    // multiplying back by 2πiξ1 recovers ψ̂
    let fhat = fft_forward(&psi).unwrap();
    let ghat = fft_forward(&out.g).unwrap();
    let err = fhat
        .values
        .iter()
        .zip(&ghat.values)
        .enumerate()
        .map(|(i, (f, g))| (f - g * Complex64::new(0.0, 2.0 * PI * fhat.grid.point(i)[0])).norm())
        .fold(0.0, f64::max);
    assert!(err <= 1e-10 * fhat.sup(), "{err}");

    let same = antiderivative_oracle(&psi, MultiIndex::new(0, 0)).unwrap();
    assert_eq!(same.g, psi);
}

#[test]
fn antiderivative_matches_running_integral() {
    // the proof's construction g(x) = ∫_{-∞}^{x1} f, on a packet whose
    // spectrum vanishes near both axes
    let f = fields::corner_packet(Grid2D::centered(512, 12.8).unwrap(), [1.0, 1.0], 4.0, 7);
    for m in [MultiIndex::new(1, 0), MultiIndex::new(0, 1), MultiIndex::new(2, 1)] {
        let out = antiderivative_oracle(&f, m).unwrap();
        let cum = cumulative_antiderivative(&f, m);
        let e = cum.rel_l2_error(&out.g).unwrap();
        assert!(e <= 1e-6, "{m:?}: {e}");
        assert!(moments(&out.g, 6).unwrap().max_abs <= 1e-8);
    }
}

#[test]
fn antiderivative_refuses_non_lizorkin_input() {
    let f = gaussian(64, 8.0);
    assert!(matches!(antiderivative_oracle(&f, MultiIndex::new(1, 0)), Err(ShearError::NotLizorkin { .. })));
}
