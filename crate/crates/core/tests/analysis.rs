use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shearkit_core::analysis::*;
use shearkit_core::coeffspace::{ParamGrid, ParamSpec};
use shearkit_core::field::{fft_forward, spectral_field, Grid2D, SampledField2D};
use shearkit_core::generator::{admissibility_constant, default_generator, make_meyer_shearlet_sided, Side};
use shearkit_core::group::{apply_rep_space, compose, inverse, GroupElement};
use shearkit_core::lizorkin::fields;
use shearkit_core::ShearError;

fn el(b: [f64; 2], s: f64, a: f64) -> GroupElement {
    GroupElement::new(b, s, a).unwrap()
}

fn rel_sup(x: &[Complex64], y: &[Complex64]) -> f64 {
    let scale = y.iter().map(|v| v.norm()).fold(0.0, f64::max);
    x.iter().zip(y).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max) / scale
}

/// Band-covered Lizorkin field used for the isometry checks.
fn isometry_field() -> SampledField2D {
    fields::wave_packet(Grid2D::centered(64, 10.0).unwrap(), [0.8, 0.0], 3.5, 7, [0.0, 0.0])
}

#[test]
fn spectral_matches_direct_on_small_grid() {
    let f = fields::wave_packet(Grid2D::centered(16, 2.0).unwrap(), [1.0, 0.0], 5.0, 0, [0.2, -0.1]);
    let params: Vec<GroupElement> = [(0.0, 1.0), (0.5, 0.8), (-0.5, 1.5), (0.25, -1.2), (-0.25, 2.0)]
        .iter()
        .map(|&(s, a)| el([0.3, -0.7], s, a))
        .collect();
    let gen = default_generator();
    let direct = transform_direct(&f, &gen, &params).unwrap();
    let spectral = transform_pointwise(&f, &gen, &params).unwrap();
    let e = rel_sup(&spectral, &direct);
    assert!(e <= 1e-4, "{e}");

    // the pointwise path agrees with the grid slices
    let pgrid = ParamGrid::from_values(f.grid, vec![0.5], vec![0.8]).unwrap();
    let vol = transform_spectral(&f, &gen, &pgrid).unwrap();
    let on_grid: Vec<GroupElement> = (0..f.grid.len()).map(|i| pgrid.element(i, 0, 0)).collect();
    let pw = transform_pointwise(&f, &gen, &on_grid).unwrap();
    assert!(rel_sup(&pw, vol.slice(0, 0)) <= 1e-12);
}

#[test]
fn transform_of_a_warped_generator_returns_its_norm() {
    let gen = default_generator();
    let g = el([0.5, -0.3], 0.3, 1.2);
    // period 48 keeps the lattice-sum error of ∫|ψ̂|² below 1e-5
    let grid = Grid2D::centered(256, 24.0).unwrap();
    // the field whose spectrum is that of π_g ψ
    let m = g.freq_warp();
    let pre = g.a.abs().powf(0.75);
    let f = spectral_field(grid, |xi| {
        let eta = [m[0][0] * xi[0] + m[0][1] * xi[1], m[1][0] * xi[0] + m[1][1] * xi[1]];
        let ph = -2.0 * std::f64::consts::PI * (g.b[0] * xi[0] + g.b[1] * xi[1]);
        gen.value(eta) * Complex64::new(ph.cos(), ph.sin()) * pre
    });
    // ‖ψ‖² = ∫|ψ̂|² by a fine trapezoid
    let (n, l) = (1200, 2.2);
    let h = 2.0 * l / n as f64;
    let mut norm2 = 0.0;
    for i in 0..=n {
        for j in 0..=n {
            norm2 += gen.value([-l + i as f64 * h, -l + j as f64 * h]).norm_sqr();
        }
    }
    norm2 *= h * h;
    let v = transform_direct(&f, &gen, &[g]).unwrap()[0];
    assert!((v - norm2).norm() <= 1e-4 * norm2, "{v} vs {norm2}");
}

#[test]
fn disjoint_frequency_support_gives_zero() {
    // at a = 3 the warped generator lives on |ξ1| ∈ [1/6, 2/3]; the packet sits at ξ1 ≈ 1.2
    let f = fields::wave_packet(Grid2D::centered(64, 8.0).unwrap(), [1.2, 0.0], 4.0, 0, [0.0, 0.0]);
    let v = transform_direct(&f, &default_generator(), &[el([0.2, 0.1], 0.3, 3.0)]).unwrap()[0];
    assert!(v.norm() <= 1e-8, "{v}");
}

#[test]
fn transform_is_covariant() {
    // both sides are Riemann sums over the dual lattice of the same integral;
    // they differ by the transform at translates by the period, which the
    // generator's slow tails keep near 1e-6 even at period 40
    let f = fields::wave_packet(Grid2D::centered(160, 20.0).unwrap(), [0.6, 0.2], 4.0, 2, [0.0, 0.0]);
    let gen = default_generator();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let hs: Vec<GroupElement> = (0..16)
        .map(|_| el([rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)], rng.gen_range(-0.8..0.8), rng.gen_range(0.7..1.6)))
        .collect();
    for _ in 0..10 {
        let sign = if rng.gen_bool(0.5) { -1.0 } else { 1.0 };
        let g = el([rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)], rng.gen_range(-0.4..0.4), sign * rng.gen_range(0.8..1.25));
        let moved = apply_rep_space(&g, &f).unwrap();
        let lhs = transform_pointwise(&moved, &gen, &hs).unwrap();
        let shifted: Vec<GroupElement> = hs.iter().map(|h| compose(&inverse(&g), h)).collect();
        let rhs = transform_pointwise(&f, &gen, &shifted).unwrap();
        // coefficients here are O(0.1); the floor is about 2e-6
        let e = lhs.iter().zip(&rhs).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
        assert!(e <= 1e-5, "{g:?}: {e}");
    }
}

#[test]
fn transform_is_linear_in_f() {
    let grid = Grid2D::centered(32, 6.0).unwrap();
    let f = fields::wave_packet(grid, [0.9, 0.2], 2.0, 1, [0.3, 0.0]);
    let g = fields::wave_packet(grid, [1.1, -0.4], 2.0, 1, [-0.5, 0.4]);
    let pgrid = ParamGrid::from_values(grid, vec![-0.5, 0.0, 0.5], vec![-1.0, 0.7, 1.4]).unwrap();
    let psi = make_meyer_shearlet_sided([0.5, 0.75, 1.5, 2.0], 1.0, Side::Positive).unwrap().shifted([0.4, -0.2]);
    let (c1, c2) = (Complex64::new(0.3, -1.2), Complex64::new(-0.7, 0.5));
    let combo = f.scale(c1).add(&g.scale(c2)).unwrap();
    let lhs = transform_spectral(&combo, &psi, &pgrid).unwrap();
    let rhs = transform_spectral(&f, &psi, &pgrid).unwrap().scale(c1).add(&transform_spectral(&g, &psi, &pgrid).unwrap().scale(c2)).unwrap();
    assert!(rel_sup(&lhs.values, &rhs.values) <= 1e-10);

}

#[test]
fn isometry_defect_is_small_and_converges() {
    let f = isometry_field();
    let gen = default_generator();
    let fine = ParamGrid::default_for(f.grid);
    let coarse = ParamGrid::new(f.grid, ParamSpec::default().coarsened()).unwrap();
    let d_fine = isometry_defect(&f, &gen, &fine).unwrap();
    let d_coarse = isometry_defect(&f, &gen, &coarse).unwrap();
    assert!(d_fine <= 1e-3, "{d_fine}");
    assert!(d_coarse >= 2.0 * d_fine, "{d_coarse} vs {d_fine}");

    let zero = SampledField2D::zeros(f.grid);
    assert!(matches!(isometry_defect(&zero, &gen, &coarse), Err(ShearError::DegenerateInput(_))));
    let c = admissibility_constant(&gen, &gen, 2).unwrap();
    assert!(c.re > 0.0);
}

#[test]
fn zero_field_and_coverage() {
    let f = isometry_field();
    let gen = default_generator();
    let pgrid = ParamGrid::new(f.grid, ParamSpec::default().coarsened()).unwrap();
    let r = coverage(&f, &gen, &gen, &pgrid).unwrap();
    assert!(r.uncovered_fraction <= 0.01, "{r:?}");
    let spec = fft_forward(&f).unwrap();
    assert!(spec.sup() > 0.0);
    let v = transform_spectral(&SampledField2D::zeros(f.grid), &gen, &pgrid).unwrap();
    assert_eq!(v.sup(), 0.0);
}
