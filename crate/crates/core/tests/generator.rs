use num_complex::Complex64;
use proptest::prelude::*;
use shearkit_core::field::{spectral_derivative, spectral_field, Grid2D};
use shearkit_core::generator::*;
use shearkit_core::lizorkin::{directional_moments, moments};
use shearkit_core::ShearError;

const PROBES: [[f64; 2]; 3] = [[1.0, 0.0], [0.7, 0.3], [-1.2, 0.5]];

#[test]
fn default_profile_examples() {
    let g = default_generator();
    assert_eq!(g.value([1.0, 0.0]), Complex64::new(1.0, 0.0));
    for xi in [[0.5, 0.0], [0.2, 0.1], [-0.49, 3.0], [0.0, 1.0]] {
        assert_eq!(g.value(xi), Complex64::new(0.0, 0.0));
        assert_eq!(eval_profile(&g, xi, [2, 1]).unwrap(), Complex64::new(0.0, 0.0));
    }
    assert_eq!(eval_profile(&g, [1.0, 0.0], [0, 0]).unwrap(), Complex64::new(1.0, 0.0));
    assert!(matches!(eval_profile(&g, [1.0, 0.0], [6, 5]), Err(ShearError::OrderTooHigh { .. })));
}

#[test]
fn band_edges_are_validated() {
    assert!(matches!(make_meyer_shearlet([0.5, 0.4, 1.5, 2.0], 1.0), Err(ShearError::BadBandEdges(_))));
    assert!(matches!(make_meyer_shearlet([0.0, 0.75, 1.5, 2.0], 1.0), Err(ShearError::BadBandEdges(_))));
    assert!(matches!(make_meyer_shearlet([0.5, 0.75, 1.5, 2.0], 2.5), Err(ShearError::BadBandEdges(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn first_derivative_matches_central_difference(x1 in -2.2..2.2f64, x2 in -2.2..2.2f64) {
        let g = default_generator();
        let h = 1e-4;
        let fd = (g.value([x1 + h, x2]) - g.value([x1 - h, x2])) / (2.0 * h);
        let d = eval_profile(&g, [x1, x2], [1, 0]).unwrap();
        // the glue is steep, so remove the known h²/6·∂³ truncation term
        let d3 = eval_profile(&g, [x1, x2], [3, 0]).unwrap();
        prop_assert!((fd - d - d3 * (h * h / 6.0)).norm() <= 1e-6, "{} vs {}", fd, d);
    }

    #[test]
    fn profile_is_even_in_xi1(x1 in 0.0..2.2f64, x2 in -2.2..2.2f64) {
        let g = default_generator();
        prop_assert_eq!(g.value([x1, x2]), g.value([-x1, -x2]));
        prop_assert_eq!(g.value([x1, x2]).im, 0.0);
    }
}

#[test]
fn constructed_generators_are_lizorkin() {
    let grid = Grid2D::centered(128, 12.0).unwrap();
    for (band, cone) in [([0.5, 0.75, 1.5, 2.0], 1.0), ([0.4, 0.6, 1.2, 1.8], 0.5), ([0.6, 0.9, 1.4, 2.2], 1.5)] {
        let g = make_meyer_shearlet(band, cone).unwrap();
        assert!(g.is_lizorkin());
        let f = spectral_field(grid, |xi| g.value(xi));
        assert!(moments(&f, 6).unwrap().max_abs <= 1e-8);
        assert!(directional_moments(&f, 1, 6).unwrap().iter().all(|v| *v <= 1e-8));
    }
}

#[test]
fn space_evaluation_matches_inverse_fft() {
    let g = default_generator();
    // wide window so the periodic images of the tails stay below tolerance
    let grid = Grid2D::centered(1024, 128.0).unwrap();
    let psi = spectral_field(grid, |xi| g.value(xi));
    let ev = SpaceEvaluator::new(&g, 16.0, 2, 2).unwrap();
    let dpsi = spectral_derivative(&psi, [1, 1]);
    let c = grid.n1 / 2;
    let (mut err, mut derr) = (0.0f64, 0.0f64);
    for i2 in c - 12..=c + 12 {
        for i1 in c - 12..=c + 12 {
            let x = [grid.x1(i1), grid.x2(i2)];
            err = err.max((ev.eval(x, [0, 0]).unwrap() - psi.at(i1, i2)).norm());
            derr = derr.max((ev.eval(x, [1, 1]).unwrap() - dpsi.at(i1, i2)).norm());
        }
    }
    assert!(err <= 1e-7, "{err}");
    assert!(derr <= 1e-6 * dpsi.sup().max(1.0), "{derr}");

    // ψ(0) = ∫ψ̂, real by symmetry
    let v0 = eval_space(&g, [0.0, 0.0], [0, 0]).unwrap();
    assert!(v0.im.abs() <= 1e-12 && (v0 - psi.at(c, c)).norm() <= 1e-7);
}

#[test]
fn spatial_decay_table() {
    let t = decay_table(&default_generator(), &[2.0, 5.0, 10.0, 20.0, 40.0]).unwrap();
    assert!(t.windows(2).all(|w| w[1].1 < w[0].1), "{t:?}");
    // the e^{-1/t} glue limits decay to roughly e^{-c√|x|}
    assert!(t[4].1 < 1e-5 && t[4].1 > 1e-9, "{t:?}");
}

#[test]
fn admissibility_two_ways() {
    let g = default_generator();
    let r = admissibility(&g, &g, &PROBES).unwrap();
    assert!(r.admissible);
    assert!(r.method_a.re > 0.0 && r.method_a.im.abs() <= 1e-12 * r.method_a.re);
    assert!(r.max_discrepancy <= 1e-4, "{}", r.max_discrepancy);
    assert!(r.probe_spread <= 1e-4, "{}", r.probe_spread);

    // a genuine pair ψ ≠ φ
    let phi = make_meyer_shearlet([0.4, 0.6, 1.2, 1.8], 0.8).unwrap();
    let r = admissibility(&g, &phi, &PROBES).unwrap();
    assert!(r.admissible && r.max_discrepancy <= 1e-4 && r.probe_spread <= 1e-4);
}

#[test]
fn inadmissible_pairs() {
    let c = gaussian_control();
    assert!(matches!(admissibility(&c, &c, &PROBES), Err(ShearError::NotAdmissible(_))));
    let band = [0.5, 0.75, 1.5, 2.0];
    let pos = make_meyer_shearlet_sided(band, 1.0, Side::Positive).unwrap();
    let neg = make_meyer_shearlet_sided(band, 1.0, Side::Negative).unwrap();
    assert!(matches!(admissibility(&pos, &neg, &PROBES), Err(ShearError::NotAdmissible(_))));
    assert!(admissibility(&pos, &pos, &PROBES).unwrap().admissible);
}
