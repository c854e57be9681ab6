use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shearkit_core::coeffspace::{haar_integral, CoefficientVolume, ParamGrid, ParamSpec};
use shearkit_core::field::{fft_forward, fft_inverse, Grid2D, SampledField2D};
use shearkit_core::group::*;
use shearkit_core::lizorkin::fields;
use shearkit_core::ShearError;

fn element() -> impl Strategy<Value = GroupElement> {
    (-5.0..5.0f64, -5.0..5.0f64, -3.0..3.0f64, 0.25..4.0f64, any::<bool>())
        .prop_map(|(b1, b2, s, a, neg)| GroupElement::new([b1, b2], s, if neg { -a } else { a }).unwrap())
}

fn dist(g: &GroupElement, h: &GroupElement) -> f64 {
    [g.b[0] - h.b[0], g.b[1] - h.b[1], g.s - h.s, g.a - h.a].iter().fold(0.0, |m, d| m.max(d.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn associative(g in element(), h in element(), k in element()) {
        let l = compose(&compose(&g, &h), &k);
        let r = compose(&g, &compose(&h, &k));
        prop_assert!(dist(&l, &r) <= 1e-12 * (1.0 + l.b[0].abs().max(l.b[1].abs())));
    }

    #[test]
    fn identity_and_inverse(g in element()) {
        let e = GroupElement::identity();
        prop_assert!(dist(&compose(&e, &g), &g) <= 1e-12);
        prop_assert!(dist(&compose(&g, &e), &g) <= 1e-12);
        prop_assert!(dist(&compose(&g, &inverse(&g)), &e) <= 1e-12);
        prop_assert!(dist(&compose(&inverse(&g), &g), &e) <= 1e-12);
    }

    #[test]
    fn linear_parts_multiply(g in element(), h in element()) {
        // the b-action of gh is that of g after h
        let gh = compose(&g, &h);
        let x = [0.7, -1.3];
        let lhs = gh.pull_back(x);
        let rhs = h.pull_back(g.pull_back(x));
        prop_assert!((lhs[0] - rhs[0]).abs() < 1e-9 && (lhs[1] - rhs[1]).abs() < 1e-9);
    }
}

#[test]
fn worked_example() {
    let g = GroupElement::new([0.0, 0.0], 1.0, 4.0).unwrap();
    let h = GroupElement::new([1.0, 1.0], 0.0, 1.0).unwrap();
    let p = compose(&g, &h);
    assert!(dist(&p, &GroupElement { b: [2.0, 2.0], s: 1.0, a: 4.0 }) <= 1e-14);
    assert!(dist(&inverse(&p), &GroupElement { b: [-1.0, -1.0], s: -0.5, a: 0.25 }) <= 1e-14);
    assert_eq!(GroupElement::new([0.0, 0.0], 0.0, 0.0), Err(ShearError::ZeroDilation));
}

#[test]
fn haar_measure_is_left_invariant() {
    let phi = |g: &GroupElement| {
        let r2 = g.b[0] * g.b[0] + g.b[1] * g.b[1];
        let t = g.a.abs().log2();
        let side = if g.a > 0.0 { 1.0 } else { 0.5 };
        Complex64::new(side * (-std::f64::consts::PI * r2 / 4.0 - g.s * g.s - t * t).exp(), 0.0)
    };
    let spec = ParamSpec { octaves: 5, per_octave: 8, s_max: 6.0, ds: 1.0 / 8.0 };
    let pgrid = ParamGrid::new(Grid2D::centered(24, 8.0).unwrap(), spec).unwrap();
    let base = haar_integral(&CoefficientVolume::from_fn(pgrid.clone(), phi), 0.0);
    for g in [
        GroupElement::new([0.5, -0.3], 0.4, 1.5).unwrap(),
        GroupElement::new([-0.2, 0.6], -0.7, 0.7).unwrap(),
    ] {
        let moved = haar_integral(&CoefficientVolume::from_fn(pgrid.clone(), |h| phi(&compose(&g, h))), 0.0);
        assert!((moved - base).norm() <= 1e-3 * base.norm(), "{moved} vs {base}");
    }
}

fn packet() -> SampledField2D {
    fields::wave_packet(Grid2D::centered(64, 7.0).unwrap(), [0.4, 0.2], 1.5, 1, [0.0, 0.0])
}

fn near_identity(rng: &mut ChaCha8Rng) -> GroupElement {
    let a: f64 = rng.gen_range(0.8..1.25);
    let sign = if rng.gen_bool(0.5) { -1.0 } else { 1.0 };
    let b = [rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)];
    GroupElement::new(b, rng.gen_range(-0.5..0.5), sign * a).unwrap()
}

#[test]
fn representation_is_unitary_and_multiplicative() {
    let f = packet();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let (g, h) = (near_identity(&mut rng), near_identity(&mut rng));
        let ratio = apply_rep_space(&g, &f).unwrap().norm_l2() / f.norm_l2();
        assert!((ratio - 1.0).abs() <= 1e-6, "norm ratio {ratio}");
        let seq = apply_rep_space(&g, &apply_rep_space(&h, &f).unwrap()).unwrap();
        let once = apply_rep_space(&compose(&g, &h), &f).unwrap();
        let e = seq.sub(&once).unwrap().sup() / f.sup();
        assert!(e <= 1e-6, "homomorphism defect {e}");
    }
}

#[test]
fn frequency_action_matches_space_action() {
    let f = packet();
    let g = GroupElement::new([0.4, -0.1], 0.3, 1.2).unwrap();
    let via_space = apply_rep_space(&g, &f).unwrap();
    let via_freq = fft_inverse(&apply_rep_freq(&g, &fft_forward(&f).unwrap()).unwrap()).unwrap();
    let e = via_freq.rel_l2_error(&via_space).unwrap();
    assert!(e <= 1e-5, "{e}");

    // a pure translation only changes the phase
    let t = GroupElement::new([0.7, 0.25], 0.0, 1.0).unwrap();
    let spec = fft_forward(&f).unwrap();
    let moved = apply_rep_freq(&t, &spec).unwrap();
    for (u, v) in spec.values.iter().zip(&moved.values) {
        assert!((u.norm() - v.norm()).abs() <= 1e-9 * spec.sup().max(1.0));
    }
}
