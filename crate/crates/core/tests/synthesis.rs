use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shearkit_core::analysis::transform_spectral;
use shearkit_core::coeffspace::{haar_inner, CoefficientVolume, ParamGrid, ParamSpec};
use shearkit_core::field::{spectral_field, Grid2D, SampledField2D};
use shearkit_core::generator::{default_generator, make_meyer_shearlet, make_meyer_shearlet_sided, Side};
use shearkit_core::lizorkin::{fields, moments};
use shearkit_core::synthesis::*;
use shearkit_core::ShearError;

fn random_volume(pgrid: ParamGrid, rng: &mut ChaCha8Rng) -> CoefficientVolume {
    let values = (0..pgrid.len()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    CoefficientVolume::new(pgrid, values).unwrap()
}

fn random_field(grid: Grid2D, rng: &mut ChaCha8Rng) -> SampledField2D {
    SampledField2D::new(grid, (0..grid.len()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()).unwrap()
}

fn l2_inner(f: &SampledField2D, g: &SampledField2D) -> Complex64 {
    f.values.iter().zip(&g.values).map(|(u, v)| u * v.conj()).sum::<Complex64>() * f.grid.cell_area()
}

/// Band-covered Lizorkin field for the reconstruction checks.
fn packet() -> SampledField2D {
    fields::wave_packet(Grid2D::centered(64, 10.0).unwrap(), [0.8, 0.0], 3.5, 7, [0.0, 0.0])
}

#[test]
fn spectral_form_matches_direct_sum() {
    let grid = Grid2D::centered(8, 1.0).unwrap();
    let pgrid = ParamGrid::from_values(grid, vec![-0.25, 0.0, 0.25], vec![-2.0, 1.5, 2.0, 3.0]).unwrap();
    let vol = random_volume(pgrid, &mut ChaCha8Rng::seed_from_u64(3));
    let gen = default_generator();
    let spectral = synthesize(&vol, &gen).unwrap();
    let direct = synthesize_direct(&vol, &gen, 32.0).unwrap();
    let e = spectral.sub(&direct).unwrap().sup() / direct.sup();
    assert!(e <= 1e-4, "{e}");
}

#[test]
fn synthesis_is_adjoint_to_analysis() {
    let grid = Grid2D::centered(32, 4.0).unwrap();
    let pgrid = ParamGrid::new(grid, ParamSpec { octaves: 2, per_octave: 4, s_max: 1.5, ds: 0.25 }).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let one_sided = make_meyer_shearlet_sided([0.5, 0.75, 1.5, 2.0], 1.0, Side::Positive).unwrap().shifted([0.3, -0.1]);
    for gen in [default_generator(), one_sided] {
        for _ in 0..5 {
            let f = random_field(grid, &mut rng);
            let vol = random_volume(pgrid.clone(), &mut rng);
            let lhs = l2_inner(&f, &synthesize(&vol, &gen).unwrap());
            let coeffs = transform_spectral(&f, &gen, &pgrid).unwrap();
            let rhs = haar_inner(&coeffs, &vol).unwrap();
            let scale = f.norm_l2() * haar_inner(&vol, &vol).unwrap().re.sqrt();
            assert!((lhs - rhs).norm() <= 1e-4 * scale, "{lhs} vs {rhs}");
        }
    }
}

#[test]
fn synthesis_is_linear() {
    let grid = Grid2D::centered(16, 2.0).unwrap();
    let pgrid = ParamGrid::new(grid, ParamSpec { octaves: 1, per_octave: 4, s_max: 1.0, ds: 0.25 }).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (x, y) = (random_volume(pgrid.clone(), &mut rng), random_volume(pgrid, &mut rng));
    let (c1, c2) = (Complex64::new(1.5, -0.5), Complex64::new(-0.25, 2.0));
    let gen = default_generator();
    let lhs = synthesize(&x.scale(c1).add(&y.scale(c2)).unwrap(), &gen).unwrap();
    let rhs = synthesize(&x, &gen).unwrap().scale(c1).add(&synthesize(&y, &gen).unwrap().scale(c2)).unwrap();
    assert!(lhs.sub(&rhs).unwrap().sup() <= 1e-10 * rhs.sup());
}

#[test]
fn reconstruction_with_equal_and_distinct_windows() {
    let f = packet();
    let pgrid = ParamGrid::default_for(f.grid);
    let psi = default_generator();
    let (out, e) = reconstruct(&f, &psi, &psi, &pgrid).unwrap();
    assert!(e <= 1e-3, "{e}");
    assert!((out.rel_l2_error(&f).unwrap() - e).abs() <= 1e-15);
    let phi = make_meyer_shearlet([0.4, 0.6, 1.2, 1.8], 0.8).unwrap();
    let (_, e) = reconstruct(&f, &psi, &phi, &pgrid).unwrap();
    assert!(e <= 1e-3, "{e}");
}

#[test]
fn uncovered_content_is_refused() {
    // a narrow bump on the ξ2 axis: no shear in the window tilts the cone that far
    let grid = Grid2D::centered(64, 8.0).unwrap();
    let f = spectral_field(grid, |xi| {
        let (d1, d2) = (xi[0], xi[1].abs() - 1.5);
        Complex64::new((-std::f64::consts::PI * 36.0 * (d1 * d1 + d2 * d2)).exp(), 0.0)
    });
    let pgrid = ParamGrid::new(grid, ParamSpec::default().coarsened()).unwrap();
    let psi = default_generator();
    let r = reconstruct_unchecked(&f, &psi, &psi, &pgrid).unwrap();
    assert!((r.rel_error - 1.0).abs() <= 1e-3, "{}", r.rel_error);
    assert!(matches!(reconstruct(&f, &psi, &psi, &pgrid), Err(ShearError::CoverageGap { .. })));
}

#[test]
fn synthesized_fields_have_vanishing_moments() {
    let grid = Grid2D::centered(32, 8.0).unwrap();
    let pgrid = ParamGrid::new(grid, ParamSpec { octaves: 2, per_octave: 4, s_max: 2.0, ds: 0.25 }).unwrap();
    let gen = default_generator();
    let vol = random_volume(pgrid, &mut ChaCha8Rng::seed_from_u64(21));
    let r = synthesis_moments(&vol, &gen, 6).unwrap();
    assert!(r.max_abs <= 1e-6, "{}", r.max_abs);
    // and on the grid, for analysis followed by synthesis of a Lizorkin field
    let f = fields::wave_packet(Grid2D::centered(128, 12.0).unwrap(), [1.0, 0.5], 3.0, 3, [0.2, -0.1]);
    let back = reconstruct(&f, &gen, &gen, &ParamGrid::new(f.grid, ParamSpec::default().coarsened()).unwrap()).unwrap().0;
    let m = moments(&back, 6).unwrap().max_abs;
    assert!(m <= 1e-6, "{m}");
    assert!(matches!(synthesis_moments(&vol, &gen, 11), Err(ShearError::OrderTooHigh { .. })));
}

#[test]
fn reconstruction_improves_under_refinement() {
    let f = packet();
    let psi = default_generator();
    let err = |spec: ParamSpec| reconstruct_unchecked(&f, &psi, &psi, &ParamGrid::new(f.grid, spec).unwrap()).unwrap().rel_error;
    let base = ParamSpec { octaves: 4, per_octave: 4, s_max: 3.0, ds: 0.25 };
    let s_path: Vec<f64> = [0.25, 0.125, 0.0625].iter().map(|&ds| err(ParamSpec { ds, ..base })).collect();
    let a_path: Vec<f64> = [4, 8, 16].iter().map(|&k| err(ParamSpec { per_octave: k, ..base })).collect();
    for path in [&s_path, &a_path] {
        assert!(path.windows(2).all(|w| w[1] <= 1.1 * w[0]), "{path:?}");
    }
}
