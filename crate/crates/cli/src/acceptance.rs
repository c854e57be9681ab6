//! The acceptance suite: eleven numerical criteria, each with a pinned
//! setup, tolerance and runtime budget.

use std::fmt;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shearkit_core::analysis::{isometry_defect, transform_direct, transform_pointwise, transform_spectral};
use shearkit_core::coeffspace::{fit_growth_bound, haar_inner, seminorm, CoefficientVolume, ParamGrid, ParamSpec, SeminormIndex};
use shearkit_core::distributions::{
    desingularized_pairing, polynomial_witness, transform_distribution, transform_distribution_with, AtomRoute, LizorkinDistribution, Polynomial, Registry,
};
use shearkit_core::field::{Grid2D, SampledField2D};
use shearkit_core::generator::{admissibility, default_generator, eval_space, gaussian_control, make_meyer_shearlet};
use shearkit_core::group::{apply_rep_space, compose, inverse, GroupElement};
use shearkit_core::lizorkin::{antiderivative_oracle, cumulative_antiderivative, fields, moments, MultiIndex};
use shearkit_core::synthesis::{reconstruct, synthesis_moments, synthesize};
use shearkit_core::{Result, ShearError};

/// Probe frequencies for the two-way admissibility check.
pub const PROBES: [[f64; 2]; 3] = [[1.0, 0.0], [0.7, 0.3], [-1.2, 0.5]];

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Measured result of one criterion, before the runtime budget is applied.
#[derive(Debug, Clone)]
pub struct Check {
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(pass: bool, detail: String) -> Self {
        Self { pass, detail }
    }

    fn and(self, other: Check) -> Check {
        Check { pass: self.pass && other.pass, detail: format!("{}; {}", self.detail, other.detail) }
    }
}

pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub budget: Duration,
    run: fn(u64) -> Result<Check>,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:>2} {:<24} {:>7.2} s of {:>3} s  {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs(),
            self.detail
        )
    }
}

const fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

pub const CRITERIA: [Criterion; 11] = [
    Criterion { id: 1, name: "group algebra", budget: secs(1), run: group_algebra },
    Criterion { id: 2, name: "representation", budget: secs(10), run: representation },
    Criterion { id: 3, name: "admissibility", budget: secs(30), run: admissibility_two_ways },
    Criterion { id: 4, name: "transform cross-oracle", budget: secs(30), run: cross_oracle },
    Criterion { id: 5, name: "isometry", budget: secs(120), run: isometry },
    Criterion { id: 6, name: "reconstruction", budget: secs(120), run: reconstruction },
    Criterion { id: 7, name: "adjointness", budget: secs(60), run: adjointness },
    Criterion { id: 8, name: "range in S0", budget: secs(30), run: range_in_s0 },
    Criterion { id: 9, name: "antiderivative oracle", budget: secs(10), run: antiderivative },
    Criterion { id: 10, name: "distributional layer", budget: secs(120), run: distributions },
    Criterion { id: 11, name: "decay witness", budget: secs(120), run: decay_witness },
];

pub fn run_criterion(c: &Criterion, seed: u64) -> Outcome {
    let start = Instant::now();
    let res = (c.run)(seed);
    let elapsed = start.elapsed();
    let (mut pass, mut detail) = match res {
        Ok(ch) => (ch.pass, ch.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    if elapsed > c.budget {
        pass = false;
        detail.push_str("; over the runtime budget");
    }
    Outcome { id: c.id, name: c.name, pass, detail, elapsed, budget: c.budget }
}

/// Runs every criterion in order, reporting each as it finishes.
pub fn run_all(seed: u64, mut report: impl FnMut(&Outcome)) -> Vec<Outcome> {
    CRITERIA
        .iter()
        .map(|c| {
            let o = run_criterion(c, seed);
            report(&o);
            o
        })
        .collect()
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn el(b: [f64; 2], s: f64, a: f64) -> GroupElement {
    GroupElement::new(b, s, a).expect("nonzero dilation")
}

fn dist(g: &GroupElement, h: &GroupElement) -> f64 {
    [g.b[0] - h.b[0], g.b[1] - h.b[1], g.s - h.s, g.a - h.a].iter().fold(0.0, |m, d| m.max(d.abs()))
}

fn sign(r: &mut ChaCha8Rng) -> f64 {
    if r.gen_bool(0.5) {
        -1.0
    } else {
        1.0
    }
}

fn random_field(grid: Grid2D, r: &mut ChaCha8Rng) -> SampledField2D {
    let values = (0..grid.len()).map(|_| Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect();
    SampledField2D::new(grid, values).expect("grid-sized")
}

fn random_volume(pgrid: ParamGrid, r: &mut ChaCha8Rng) -> CoefficientVolume {
    let values = (0..pgrid.len()).map(|_| Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect();
    CoefficientVolume::new(pgrid, values).expect("volume-sized")
}

fn group_algebra(seed: u64) -> Result<Check> {
    let mut r = rng(seed, 1);
    let mut draw = || {
        let a = r.gen_range(0.25..4.0);
        let s = sign(&mut r);
        el([r.gen_range(-5.0..5.0), r.gen_range(-5.0..5.0)], r.gen_range(-3.0..3.0), s * a)
    };
    let e = GroupElement::identity();
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (g, h, k) = (draw(), draw(), draw());
        let assoc = dist(&compose(&compose(&g, &h), &k), &compose(&g, &compose(&h, &k)));
        let unit = dist(&compose(&e, &g), &g).max(dist(&compose(&g, &e), &g));
        let inv = dist(&compose(&g, &inverse(&g)), &e).max(dist(&compose(&inverse(&g), &g), &e));
        worst = worst.max(assoc).max(unit).max(inv);
    }
    let p = compose(&el([0.0, 0.0], 1.0, 4.0), &el([1.0, 1.0], 0.0, 1.0));
    let ex = dist(&p, &el([2.0, 2.0], 1.0, 4.0));
    Ok(Check::new(worst <= 1e-12 && ex <= 1e-14, format!("1000 triples max error {worst:.1e}, worked example error {ex:.1e}")))
}

fn representation(seed: u64) -> Result<Check> {
    let f = fields::wave_packet(Grid2D::centered(64, 7.0)?, [0.4, 0.2], 1.5, 1, [0.0, 0.0]);
    let mut r = rng(seed, 2);
    let mut near = || {
        let a = r.gen_range(0.8..1.25);
        let s = sign(&mut r);
        el([r.gen_range(-0.5..0.5), r.gen_range(-0.5..0.5)], r.gen_range(-0.5..0.5), s * a)
    };
    let (mut unit, mut hom) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let (g, h) = (near(), near());
        unit = unit.max((apply_rep_space(&g, &f)?.norm_l2() / f.norm_l2() - 1.0).abs());
        let seq = apply_rep_space(&g, &apply_rep_space(&h, &f)?)?;
        let once = apply_rep_space(&compose(&g, &h), &f)?;
        hom = hom.max(seq.sub(&once)?.sup() / f.sup());
    }
    Ok(Check::new(unit <= 1e-6 && hom <= 1e-5, format!("norm ratio defect {unit:.1e}, homomorphism defect {hom:.1e}")))
}

fn admissibility_two_ways(_seed: u64) -> Result<Check> {
    let psi = default_generator();
    let phi = make_meyer_shearlet([0.4, 0.6, 1.2, 1.8], 0.8)?;
    let mut check = Check::new(true, String::new());
    for (label, b) in [("psi=phi", &psi), ("psi!=phi", &phi)] {
        let rep = admissibility(&psi, b, &PROBES)?;
        let ok = rep.admissible && rep.max_discrepancy <= 1e-4 && rep.probe_spread <= 1e-4;
        check.pass &= ok;
        check.detail.push_str(&format!("{label}: discrepancy {:.1e} spread {:.1e}; ", rep.max_discrepancy, rep.probe_spread));
    }
    let control = gaussian_control();
    let rejected = matches!(admissibility(&control, &control, &PROBES), Err(ShearError::NotAdmissible(_)));
    check.pass &= rejected;
    check.detail.push_str(if rejected { "Gaussian control rejected" } else { "Gaussian control NOT rejected" });
    Ok(check)
}

fn cross_oracle(_seed: u64) -> Result<Check> {
    let f = fields::wave_packet(Grid2D::centered(16, 2.0)?, [1.0, 0.0], 5.0, 0, [0.2, -0.1]);
    let params: Vec<GroupElement> =
        [(0.0, 1.0), (0.5, 0.8), (-0.5, 1.5), (0.25, -1.2), (-0.25, 2.0)].iter().map(|&(s, a)| el([0.3, -0.7], s, a)).collect();
    let gen = default_generator();
    let direct = transform_direct(&f, &gen, &params)?;
    let spectral = transform_pointwise(&f, &gen, &params)?;
    let scale = direct.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let e = spectral.iter().zip(&direct).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max) / scale;
    Ok(Check::new(e <= 1e-4, format!("sup relative error {e:.1e} over 5 (s, a)")))
}

/// Band-covered Lizorkin field on the 64×64 grid.
pub fn sample_field() -> SampledField2D {
    fields::wave_packet(Grid2D::centered(64, 10.0).expect("valid grid"), [0.8, 0.0], 3.5, 7, [0.0, 0.0])
}

fn isometry(_seed: u64) -> Result<Check> {
    let f = sample_field();
    let gen = default_generator();
    let fine = isometry_defect(&f, &gen, &ParamGrid::default_for(f.grid))?;
    let coarse = isometry_defect(&f, &gen, &ParamGrid::new(f.grid, ParamSpec::default().coarsened())?)?;
    Ok(Check::new(
        fine <= 1e-3 && coarse >= 2.0 * fine,
        format!("defect {fine:.1e} on the default grid, {coarse:.1e} at half resolution ({:.1}x)", coarse / fine),
    ))
}

fn reconstruction(_seed: u64) -> Result<Check> {
    let f = sample_field();
    let pgrid = ParamGrid::default_for(f.grid);
    let psi = default_generator();
    let phi = make_meyer_shearlet([0.4, 0.6, 1.2, 1.8], 0.8)?;
    let (_, same) = reconstruct(&f, &psi, &psi, &pgrid)?;
    let (_, distinct) = reconstruct(&f, &psi, &phi, &pgrid)?;
    Ok(Check::new(same <= 1e-3 && distinct <= 1e-3, format!("relative L2 error {same:.1e} (psi=phi), {distinct:.1e} (psi!=phi)")))
}

fn adjointness(seed: u64) -> Result<Check> {
    let grid = Grid2D::centered(32, 4.0)?;
    let pgrid = ParamGrid::new(grid, ParamSpec { octaves: 2, per_octave: 4, s_max: 1.5, ds: 0.25 })?;
    let gen = default_generator();
    let mut r = rng(seed, 7);
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let f = random_field(grid, &mut r);
        let vol = random_volume(pgrid.clone(), &mut r);
        let lhs = f.inner(&synthesize(&vol, &gen)?)?;
        let rhs = haar_inner(&transform_spectral(&f, &gen, &pgrid)?, &vol)?;
        let scale = f.norm_l2() * haar_inner(&vol, &vol)?.re.sqrt();
        worst = worst.max((lhs - rhs).norm() / scale);
    }
    Ok(Check::new(worst <= 1e-4, format!("worst defect {worst:.1e} of the norm product over 5 pairs")))
}

fn range_in_s0(seed: u64) -> Result<Check> {
    let grid = Grid2D::centered(32, 8.0)?;
    let pgrid = ParamGrid::new(grid, ParamSpec { octaves: 2, per_octave: 4, s_max: 2.0, ds: 0.25 })?;
    let gen = default_generator();
    let vol = random_volume(pgrid, &mut rng(seed, 8));
    let exact = synthesis_moments(&vol, &gen, 6)?.max_abs;
    let f = fields::wave_packet(Grid2D::centered(128, 12.0)?, [1.0, 0.5], 3.0, 3, [0.2, -0.1]);
    let back = reconstruct(&f, &gen, &gen, &ParamGrid::new(f.grid, ParamSpec::default().coarsened())?)?.0;
    let sampled = moments(&back, 6)?.max_abs;
    Ok(Check::new(
        exact <= 1e-6 && sampled <= 1e-6,
        format!("moments up to order 6: {exact:.1e} for a random volume, {sampled:.1e} on the grid"),
    ))
}

fn antiderivative(_seed: u64) -> Result<Check> {
    let f = fields::corner_packet(Grid2D::centered(512, 12.8)?, [1.0, 1.0], 4.0, 7);
    let (mut gap, mut mom) = (0.0f64, 0.0f64);
    for m in [MultiIndex::new(1, 0), MultiIndex::new(0, 1), MultiIndex::new(2, 1)] {
        let out = antiderivative_oracle(&f, m)?;
        gap = gap.max(cumulative_antiderivative(&f, m).rel_l2_error(&out.g)?);
        mom = mom.max(moments(&out.g, 6)?.max_abs);
    }
    Ok(Check::new(gap <= 1e-6 && mom <= 1e-8, format!("division vs running sum {gap:.1e}, output moments {mom:.1e}")))
}

fn random_params(n: usize, r: &mut ChaCha8Rng) -> Vec<GroupElement> {
    (0..n)
        .map(|_| {
            let s = sign(r);
            el([r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0)], r.gen_range(-2.0..2.0), s * r.gen_range(-2.0..2.0f64).exp2())
        })
        .collect()
}

/// One entry per registry kind, plus derivative atoms and a derivative term.
pub fn registry_examples() -> Vec<LizorkinDistribution> {
    let grid = Grid2D::centered(32, 4.0).expect("valid grid");
    vec![
        LizorkinDistribution::delta([0.5, -0.5]),
        LizorkinDistribution::new().with_atom(ONE, [0.0, 0.0], MultiIndex::new(1, 1)),
        LizorkinDistribution::function(Registry::Gaussian { width: 1.0 }),
        LizorkinDistribution::function(Registry::Ramp),
        LizorkinDistribution::function(Registry::Sinusoid { freq: [0.75, 0.25], phase: 0.3 }),
        LizorkinDistribution::function(Registry::Abs),
        LizorkinDistribution::function(Registry::PolyGaussian { power: MultiIndex::new(1, 2), width: 1.5 }),
        LizorkinDistribution::function(Registry::Sampled(fields::gaussian(grid, [0.2, 0.0], 1.0))),
        LizorkinDistribution::new().with_term(ONE, MultiIndex::new(2, 0), Registry::Ramp),
    ]
}

fn distributions(seed: u64) -> Result<Check> {
    let gen = default_generator();
    let mut r = rng(seed, 10);

    // (a) δ against its closed form, through both atom routes
    let params = random_params(50, &mut r);
    let delta = LizorkinDistribution::delta([0.0, 0.0]);
    let space = transform_distribution(&delta, &gen, &params)?;
    let freq = transform_distribution_with(&delta, &gen, &params, AtomRoute::Frequency)?;
    let mut ea = 0.0f64;
    for ((g, u), v) in params.iter().zip(&space).zip(&freq) {
        let exact = eval_space(&gen, g.pull_back([0.0, 0.0]), [0, 0])?.conj() * g.a.abs().powf(-0.75);
        ea = ea.max((u - exact).norm()).max((v - exact).norm());
    }
    let a = Check::new(ea <= 1e-6, format!("(a) delta error {ea:.1e}"));

    // (b) polynomials vanish
    let p = Polynomial { terms: vec![(MultiIndex::new(0, 0), ONE), (MultiIndex::new(2, 1), Complex64::new(-0.5, 2.0))] };
    let eb = transform_distribution(&LizorkinDistribution::new().with_poly(p.clone()), &gen, &params)?.iter().map(|v| v.norm()).fold(0.0, f64::max);
    // the transform drops polynomial terms; the quadrature witness measures
    // the pairing itself, limited by the window
    let w = polynomial_witness(&p, &gen, &el([0.3, -0.2], 0.5, 1.2), 24.0)?.relative();
    let b = Check::new(eb <= 1e-6, format!("(b) polynomial {eb:.1e}, space-domain witness {w:.1e}"));

    // (c) desingularized δ pairing recovers φ(0)
    let grid = Grid2D::centered(64, 8.0)?;
    let pgrid = ParamGrid::new(grid, ParamSpec::default().coarsened())?;
    let phi = fields::wave_packet(grid, [0.9, 0.3], 3.0, 6, [0.4, -0.2]);
    let centre = phi.at(grid.n1 / 2, grid.n2 / 2);
    let ec = (desingularized_pairing(&delta, &gen, &gen, &phi, &pgrid)? - centre).norm() / phi.sup();
    let c = Check::new(ec <= 1e-2, format!("(c) desingularized delta {ec:.1e} of sup"));

    // (d) every registry transform has polynomial growth
    let mut grid_params = Vec::new();
    for b1 in [-6.0, -1.0, 2.0, 6.0] {
        for b2 in [-6.0, -1.0, 0.5, 6.0] {
            for s in [-2.0, -0.5, 0.5, 2.0] {
                for a in [-4.0, -1.0, 0.25, 0.5, 2.0, 4.0] {
                    grid_params.push(el([b1, b2], s, a));
                }
            }
        }
    }
    let mut nu = 0.0f64;
    let mut fits = true;
    for f in registry_examples() {
        let v = transform_distribution(&f, &gen, &grid_params)?;
        let samples: Vec<_> = grid_params.iter().copied().zip(v).collect();
        match fit_growth_bound(&samples) {
            Ok(g) => nu = nu.max(g.nu1).max(g.nu2).max(g.nu3),
            Err(_) => fits = false,
        }
    }
    let d = Check::new(fits && nu <= 6.0, format!("(d) largest growth exponent {nu}{}", if fits { "" } else { ", some fit failed" }));
    Ok(a.and(b).and(c).and(d))
}

const WITNESS: ParamSpec = ParamSpec { octaves: 3, per_octave: 2, s_max: 3.0, ds: 0.5 };

fn witness(n: usize, hw: f64, spec: ParamSpec) -> Result<CoefficientVolume> {
    let f = fields::wave_packet(Grid2D::centered(n, hw)?, [0.8, 0.0], 2.0, 7, [0.0, 0.0]);
    transform_spectral(&f, &default_generator(), &ParamGrid::new(f.grid, spec)?)
}

fn decay_witness(_seed: u64) -> Result<Check> {
    let base = witness(96, 12.0, WITNESS)?;
    let wider = [witness(192, 24.0, WITNESS)?, witness(96, 12.0, ParamSpec { s_max: 6.0, ..WITNESS })?, witness(96, 12.0, ParamSpec { octaves: 6, ..WITNESS })?];
    let (mut boundary, mut change) = (0usize, 0.0f64);
    let mut finite = true;
    for k1 in 0..4 {
        for k2 in 0..4 {
            for l in 0..4 {
                for m in 0..4 {
                    let idx = SeminormIndex::weights(k1, k2, l, m);
                    let v = seminorm(&base, &idx)?;
                    finite &= v.value.is_finite();
                    boundary += usize::from(!v.interior);
                    for w in &wider {
                        change = change.max((seminorm(w, &idx)?.value / v.value - 1.0).abs());
                    }
                }
            }
        }
    }
    Ok(Check::new(
        finite && boundary == 0 && change <= 0.05,
        format!("256 seminorms, {boundary} suprema on the window edge, largest change under doubling {:.2}%", 100.0 * change),
    ))
}
