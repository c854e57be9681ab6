//! Lizorkin distributions in Schwartz-structure form `f = Σ c ∂^m δ_{x0} +
//! Σ c ∂^α g + p` and their shearlet transform `S_ψ f(b,s,a) = (f, conj π_{b,s,a}ψ)`.
//!
//! Function terms are paired in frequency,
//! `(∂^α g, conj π_{b,s,a}ψ) = |a|^{3/4} ∫ (2πiξ)^α ĝ(ξ) e^{2πibξ} conj ψ̂(A_aᵗN_sξ) dξ`,
//! which only sees `ĝ` away from the strip `|ξ1| < r0/|a|` where every
//! registry spectrum is an ordinary function (or a line/point measure).
//! Atoms are evaluated in space by the chain rule through `A_a^{-1}N_s^{-1}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::analysis::{coverage, COVERAGE_TOL};
use crate::coeffspace::{haar_pairing, CoefficientVolume, ParamGrid};
use crate::error::{Result, ShearError};
use crate::field::{dtft, spectral_derivative, Grid2D, SampledField2D, SpectralFrame, TrigInterpolant};
use crate::generator::{admissibility_constant, binomial, gaussian_deriv_1d, support_nodes_split, ShearletGenerator, SpaceEvaluator};
use crate::group::GroupElement;
use crate::lizorkin::{moments, MultiIndex};
use crate::quadrature::{composite_rule, ComplexSum};

/// Total number of atoms, function terms and monomials allowed.
pub const MAX_TERMS: usize = 64;
/// Highest derivative order on an atom or function term.
pub const MAX_DERIV: usize = 4;

const GL_ORDER: usize = 16;
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

fn cis(t: f64) -> Complex64 {
    Complex64::new(t.cos(), t.sin())
}

fn two_pi_i_pow(xi: [f64; 2], m: MultiIndex) -> Complex64 {
    let t = Complex64::new(0.0, 2.0 * PI);
    (t * xi[0]).powu(m.m1 as u32) * (t * xi[1]).powu(m.m2 as u32)
}

/// Closed-form slowly growing functions usable as `g` in `∂^α g`.
#[derive(Debug, Clone, PartialEq)]
pub enum Registry {
    /// `e^{-π|x|²/w²}`
    Gaussian { width: f64 },
    /// `max(x1, 0)`, the ReLU ramp.
    Ramp,
    /// `cos(2π k·x + θ)`
    Sinusoid { freq: [f64; 2], phase: f64 },
    /// `|x|`
    Abs,
    /// `x^p e^{-π|x|²/w²}`
    PolyGaussian { power: MultiIndex, width: f64 },
    /// A sampled field, read as its band-limited interpolant on ℝ².
    Sampled(SampledField2D),
}

impl Registry {
    pub fn name(&self) -> &'static str {
        match self {
            Registry::Gaussian { .. } => "gaussian",
            Registry::Ramp => "ramp",
            Registry::Sinusoid { .. } => "sinusoid",
            Registry::Abs => "abs",
            Registry::PolyGaussian { .. } => "poly_gaussian",
            Registry::Sampled(_) => "sampled",
        }
    }

    /// Degree of the polynomial bounding `|g|`.
    pub fn growth_degree(&self) -> u32 {
        match self {
            Registry::Ramp | Registry::Abs => 1,
            _ => 0,
        }
    }

    /// `g(x)`; sampled terms are evaluated through their interpolant.
    pub fn value(&self, x: [f64; 2]) -> Complex64 {
        let re = match self {
            Registry::Gaussian { width } => (-PI * (x[0] * x[0] + x[1] * x[1]) / (width * width)).exp(),
            Registry::Ramp => x[0].max(0.0),
            Registry::Sinusoid { freq, phase } => (2.0 * PI * (freq[0] * x[0] + freq[1] * x[1]) + phase).cos(),
            Registry::Abs => x[0].hypot(x[1]),
            Registry::PolyGaussian { power, width } => {
                x[0].powi(power.m1 as i32)
                    * x[1].powi(power.m2 as i32)
                    * (-PI * (x[0] * x[0] + x[1] * x[1]) / (width * width)).exp()
            }
            Registry::Sampled(f) => return TrigInterpolant::new(f).eval(x),
        };
        Complex64::new(re, 0.0)
    }

    /// `ĝ(ξ)` for terms whose spectrum is a function off `ξ1 = 0`.
    fn density(&self, xi: [f64; 2]) -> Option<Complex64> {
        match self {
            Registry::Gaussian { width } => {
                let w2 = width * width;
                Some(Complex64::new(w2 * (-PI * w2 * (xi[0] * xi[0] + xi[1] * xi[1])).exp(), 0.0))
            }
            Registry::PolyGaussian { power, width } => {
                // x^p g ↔ (i/2π)^{|p|} ∂^p ĝ
                let w = *width;
                let d1 = w.powi(power.m1 as i32) * gaussian_deriv_1d(w * xi[0], power.m1);
                let d2 = w.powi(power.m2 as i32) * gaussian_deriv_1d(w * xi[1], power.m2);
                Some(Complex64::new(0.0, 0.5 / PI).powu(power.order() as u32) * (w * w * d1 * d2))
            }
            Registry::Abs => {
                let r = xi[0].hypot(xi[1]);
                Some(Complex64::new(-1.0 / (4.0 * PI * PI * r * r * r), 0.0))
            }
            Registry::Sampled(f) => Some(dtft(f, xi)),
            Registry::Ramp | Registry::Sinusoid { .. } => None,
        }
    }
}

/// Density of the ramp spectrum on the line `ξ2 = 0`, away from `ξ1 = 0`.
fn ramp_density(xi1: f64) -> f64 {
    -1.0 / (4.0 * PI * PI * xi1 * xi1)
}

/// `c ∂^m δ_{x0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub coeff: Complex64,
    pub location: [f64; 2],
    pub deriv: MultiIndex,
}

/// `c ∂^α g`.
#[derive(Debug, Clone, PartialEq)]
pub struct FuncTerm {
    pub coeff: Complex64,
    pub deriv: MultiIndex,
    pub g: Registry,
}

/// `Σ c_m x^m`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Polynomial {
    pub terms: Vec<(MultiIndex, Complex64)>,
}

impl Polynomial {
    pub fn eval(&self, x: [f64; 2]) -> Complex64 {
        self.terms.iter().map(|(m, c)| c * (x[0].powi(m.m1 as i32) * x[1].powi(m.m2 as i32))).sum()
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|(m, _)| m.order()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|(_, c)| *c == ZERO)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LizorkinDistribution {
    pub atoms: Vec<Atom>,
    pub func_terms: Vec<FuncTerm>,
    pub poly: Polynomial,
}

impl LizorkinDistribution {
    pub fn new() -> Self {
        Self::default()
    }

    /// `δ_{x0}`.
    pub fn delta(x0: [f64; 2]) -> Self {
        Self::new().with_atom(Complex64::new(1.0, 0.0), x0, MultiIndex::new(0, 0))
    }

    /// `g` itself.
    pub fn function(g: Registry) -> Self {
        Self::new().with_term(Complex64::new(1.0, 0.0), MultiIndex::new(0, 0), g)
    }

    pub fn with_atom(mut self, coeff: Complex64, location: [f64; 2], deriv: MultiIndex) -> Self {
        self.atoms.push(Atom { coeff, location, deriv });
        self
    }

    pub fn with_term(mut self, coeff: Complex64, deriv: MultiIndex, g: Registry) -> Self {
        self.func_terms.push(FuncTerm { coeff, deriv, g });
        self
    }

    pub fn with_poly(mut self, poly: Polynomial) -> Self {
        self.poly.terms.extend(poly.terms);
        self
    }

    pub fn term_count(&self) -> usize {
        self.atoms.len() + self.func_terms.len() + self.poly.terms.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.term_count() > MAX_TERMS {
            return Err(ShearError::TooManyTerms(self.term_count()));
        }
        let orders = self.atoms.iter().map(|a| a.deriv.order()).chain(self.func_terms.iter().map(|t| t.deriv.order()));
        for o in orders {
            if o > MAX_DERIV {
                return Err(ShearError::OrderTooHigh { order: o, max: MAX_DERIV });
            }
        }
        for t in &self.func_terms {
            let ok = match &t.g {
                Registry::Gaussian { width } | Registry::PolyGaussian { width, .. } => width.is_finite() && *width > 0.0,
                Registry::Sinusoid { freq, phase } => freq.iter().chain([phase]).all(|v| v.is_finite()),
                _ => true,
            };
            if !ok {
                return Err(ShearError::InvalidArgument(format!("bad parameters for registry term {}", t.g.name())));
            }
        }
        Ok(())
    }
}

/// `∂^m_x π_gψ(x) = |a|^{-3/4} ∂^m_x [ψ(A_a^{-1}N_s^{-1}(x − b))]`, by the
/// chain rule `∂_{x1} = a^{-1}∂_{y1}`, `∂_{x2} = (s/a)∂_{y1} + (|a|^{1/2}/a)∂_{y2}`.
pub fn rep_derivative(ev: &SpaceEvaluator, g: &GroupElement, x: [f64; 2], m: MultiIndex) -> Result<Complex64> {
    let y = g.pull_back(x);
    let a = g.a;
    let r = a.abs().sqrt();
    let mut acc = ComplexSum::new();
    for k in 0..=m.m2 {
        let c = binomial(m.m2, k) * (g.s / a).powi(k as i32) * (r / a).powi((m.m2 - k) as i32);
        acc.add(ev.eval(y, [m.m1 + k, m.m2 - k])? * c);
    }
    Ok(acc.value() * (a.abs().powf(-0.75) / a.powi(m.m1 as i32)))
}

/// How atoms are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomRoute {
    /// Space-domain chain rule on `ψ` (the default).
    Space,
    /// The same frequency integral as the function terms, `δ̂_{x0} = e^{-2πix0ξ}`.
    Frequency,
}

/// Quadrature nodes over the support of `ψ̂` for an integrand carrying the
/// phase `e^{2πixξ}` with `|x_i| ≤ |b_i| + reach`. Panels per smooth piece
/// follow the phase's variation along `|η1|` and along `u = η2/η1`, at
/// about three cycles per 16-point panel.
fn phase_nodes(gen: &ShearletGenerator, g: &GroupElement, reach: f64) -> Result<Vec<([f64; 2], f64)>> {
    let (band, cone, _) = gen
        .support()
        .ok_or_else(|| ShearError::InvalidArgument("distributional transform needs a compactly supported generator".into()))?;
    let (x1, x2) = (g.b[0].abs() + reach, g.b[1].abs() + reach);
    let (a, r) = (g.a.abs(), g.a.abs().sqrt());
    let cycles_r = (band[3] - band[0]) * (x1 / a + x2 * (g.s.abs() / a + cone / r));
    let cycles_u = 2.0 * cone * x2 * band[3] / r;
    let per_piece = |cycles: f64, pieces: f64| 2 + (cycles / (3.0 * pieces)).ceil() as usize;
    Ok(support_nodes_split(&[gen], per_piece(cycles_r, 3.0), per_piece(cycles_u, 4.0)).expect("support checked above"))
}

/// `|a|^{3/4} ∫ F(ξ) e^{2πibξ} conj ψ̂(Mξ) dξ` over the support of `ψ̂`,
/// substituting `η = Mξ`; `reach` bounds `|x|` of any extra phase in `F`.
fn freq_integral(gen: &ShearletGenerator, g: &GroupElement, reach: f64, spec: &dyn Fn([f64; 2]) -> Complex64) -> Result<Complex64> {
    let nodes = phase_nodes(gen, g, reach)?;
    let (a, s) = (g.a, g.s);
    let r = a.abs().sqrt();
    let mut acc = ComplexSum::new();
    for (eta, w) in nodes {
        let q = gen.value(eta);
        if q == ZERO {
            continue;
        }
        let x1 = eta[0] / a;
        let xi = [x1, s * x1 + r / a * eta[1]];
        let v = spec(xi);
        if v == ZERO {
            continue;
        }
        acc.add(v * cis(2.0 * PI * (g.b[0] * xi[0] + g.b[1] * xi[1])) * q.conj() * w);
    }
    Ok(acc.value() * a.abs().powf(-0.75))
}

/// Largest `|x_i|` over samples above `1e-13` of the field's sup.
fn effective_reach(f: &SampledField2D) -> f64 {
    let cut = 1e-13 * f.sup();
    let mut r = 0.0f64;
    for (i, v) in f.values.iter().enumerate() {
        if v.norm() > cut {
            let x = f.grid.point(i);
            r = r.max(x[0].abs()).max(x[1].abs());
        }
    }
    r
}

/// The frequency integral for a sampled term, whose spectrum is the
/// band-limited DTFT. Support nodes come in blocks of equal `η1`, hence
/// equal `ξ1`, so the DTFT is contracted over `x1` once per block.
fn sampled_transform(f: &SampledField2D, deriv: MultiIndex, gen: &ShearletGenerator, g: &GroupElement) -> Result<Complex64> {
    let nodes = phase_nodes(gen, g, effective_reach(f))?;
    let gr = f.grid;
    let ny = gr.nyquist();
    let (a, s) = (g.a, g.s);
    let r = a.abs().sqrt();
    let mut acc = ComplexSum::new();
    let mut row = vec![ZERO; gr.n2];
    let mut cur = f64::NAN;
    for (eta, w) in nodes {
        let q = gen.value(eta);
        if q == ZERO {
            continue;
        }
        let x1 = eta[0] / a;
        let xi = [x1, s * x1 + r / a * eta[1]];
        if xi[0].abs() > ny[0] || xi[1].abs() > ny[1] {
            continue;
        }
        if eta[0] != cur {
            cur = eta[0];
            let ph: Vec<Complex64> = (0..gr.n1).map(|i| cis(-2.0 * PI * gr.x1(i) * x1)).collect();
            for (j, rv) in row.iter_mut().enumerate() {
                *rv = f.values[j * gr.n1..(j + 1) * gr.n1].iter().zip(&ph).map(|(v, p)| v * p).sum::<Complex64>();
            }
        }
        let spec = row.iter().enumerate().map(|(j, rv)| rv * cis(-2.0 * PI * gr.x2(j) * xi[1])).sum::<Complex64>() * gr.cell_area();
        acc.add(spec * two_pi_i_pow(xi, deriv) * cis(2.0 * PI * (g.b[0] * xi[0] + g.b[1] * xi[1])) * q.conj() * w);
    }
    Ok(acc.value() * a.abs().powf(-0.75))
}

fn term_transform(t: &FuncTerm, gen: &ShearletGenerator, g: &GroupElement) -> Result<Complex64> {
    let pre = t.coeff * g.a.abs().powf(0.75);
    match &t.g {
        Registry::Sinusoid { freq, phase } => {
            let k = *freq;
            let mk = g.warp_freq(k);
            let plus = cis(*phase) * two_pi_i_pow(k, t.deriv) * cis(2.0 * PI * (g.b[0] * k[0] + g.b[1] * k[1])) * gen.value(mk).conj();
            let nk = [-k[0], -k[1]];
            let minus = cis(-*phase) * two_pi_i_pow(nk, t.deriv) * cis(-2.0 * PI * (g.b[0] * k[0] + g.b[1] * k[1])) * gen.value([-mk[0], -mk[1]]).conj();
            Ok(pre * 0.5 * (plus + minus))
        }
        Registry::Ramp => {
            if t.deriv.m2 > 0 {
                return Ok(ZERO);
            }
            // line measure on ξ2 = 0: η1 = aξ1 runs over the band
            let (band, _, _) = gen.support().ok_or_else(|| ShearError::InvalidArgument("generator without compact support".into()))?;
            let panels = 2 + (g.b[0].abs() * band[3] / g.a.abs() / 3.0).ceil() as usize;
            let (r, w) = composite_rule(&band, panels, GL_ORDER);
            let (a, s) = (g.a, g.s);
            let u = -s / a.abs().sqrt();
            let mut acc = ComplexSum::new();
            for sg in [-1.0, 1.0] {
                for (ri, wi) in r.iter().zip(&w) {
                    let e1 = sg * ri;
                    let q = gen.value([e1, u * e1]);
                    if q == ZERO {
                        continue;
                    }
                    let x1 = e1 / a;
                    let f = Complex64::new(0.0, 2.0 * PI * x1).powu(t.deriv.m1 as u32) * ramp_density(x1);
                    acc.add(f * cis(2.0 * PI * g.b[0] * x1) * q.conj() * *wi);
                }
            }
            Ok(pre * acc.value() / a.abs())
        }
        Registry::Sampled(f) => Ok(t.coeff * sampled_transform(f, t.deriv, gen, g)?),
        other => {
            let reach = match other {
                Registry::Gaussian { width } | Registry::PolyGaussian { width, .. } => 3.0 * width,
                _ => 0.0,
            };
            let d = t.deriv;
            let v = freq_integral(gen, g, reach, &|xi| other.density(xi).map_or(ZERO, |h| h * two_pi_i_pow(xi, d)))?;
            Ok(t.coeff * v)
        }
    }
}

/// `S_ψ f` at each parameter. The polynomial part is annihilated exactly
/// (see [`polynomial_witness`]) and is not evaluated.
pub fn transform_distribution(f: &LizorkinDistribution, gen: &ShearletGenerator, params: &[GroupElement]) -> Result<Vec<Complex64>> {
    transform_distribution_with(f, gen, params, AtomRoute::Space)
}

pub fn transform_distribution_with(
    f: &LizorkinDistribution,
    gen: &ShearletGenerator,
    params: &[GroupElement],
    route: AtomRoute,
) -> Result<Vec<Complex64>> {
    f.validate()?;
    let (_, cone, _) = gen
        .support()
        .ok_or_else(|| ShearError::InvalidArgument("distributional transform needs a compactly supported generator".into()))?;
    let ev = if route == AtomRoute::Space && !f.atoms.is_empty() {
        let mut radius = 1.0f64;
        let mut order = 0;
        for g in params {
            for at in &f.atoms {
                let y = g.pull_back(at.location);
                radius = radius.max(y[0].abs() + cone * y[1].abs() + 1.0);
                order = order.max(at.deriv.order());
            }
        }
        Some(SpaceEvaluator::new(gen, radius, order, 1)?)
    } else {
        None
    };
    params
        .par_iter()
        .map(|g| {
            let mut acc = ComplexSum::new();
            for at in &f.atoms {
                let sign = if at.deriv.order() % 2 == 0 { 1.0 } else { -1.0 };
                let v = match &ev {
                    Some(ev) => rep_derivative(ev, g, at.location, at.deriv)?.conj(),
                    None => {
                        let x0 = at.location;
                        let d = at.deriv;
                        let reach = x0[0].abs().max(x0[1].abs());
                        // (-1)^{|m|} is already inside (2πiξ)^m against e^{-2πix0ξ}
                        freq_integral(gen, g, reach, &|xi| two_pi_i_pow(xi, d) * cis(-2.0 * PI * (x0[0] * xi[0] + x0[1] * xi[1])))? * sign
                    }
                };
                acc.add(at.coeff * sign * v);
            }
            for t in &f.func_terms {
                acc.add(term_transform(t, gen, g)?);
            }
            Ok(acc.value())
        })
        .collect()
}

/// Space-domain check that a polynomial is annihilated by `π_gψ`.
#[derive(Debug, Clone, Copy)]
pub struct PolynomialWitness {
    /// `∫ p conj π_gψ` over the window.
    pub value: Complex64,
    /// `∫ |p| |π_gψ|` over the same window.
    pub scale: f64,
}

impl PolynomialWitness {
    pub fn relative(&self) -> f64 {
        self.value.norm() / self.scale.max(f64::MIN_POSITIVE)
    }
}

/// `∫ p(x) conj π_gψ(x) dx` by trapezoid sums in the atom's own
/// coordinates, `|a|^{3/4} ∫ p(b + N_sA_a y) conj ψ(y) dy` over
/// `|y_i| ≤ half_width`. It vanishes in exact arithmetic; the measured
/// value is limited by the window since `ψ` only decays like `e^{-c√|y|}`.
pub fn polynomial_witness(p: &Polynomial, gen: &ShearletGenerator, g: &GroupElement, half_width: f64) -> Result<PolynomialWitness> {
    let h = 0.125;
    let n = (2.0 * half_width / h).round() as usize;
    let ev = SpaceEvaluator::new(gen, half_width * 2.0, 0, 1)?;
    let a = g.a;
    let r = a.abs().sqrt();
    let fwd = [[a, -g.s * a / r], [0.0, a / r]];
    let rows: Vec<(Complex64, f64)> = (0..n)
        .into_par_iter()
        .map(|j| {
            let y2 = -half_width + j as f64 * h;
            let vals = ev.eval_row(y2, -half_width, h, n, [0, 0])?;
            let mut acc = ComplexSum::new();
            let mut mag = 0.0;
            for (k, v) in vals.iter().enumerate() {
                let y1 = -half_width + k as f64 * h;
                let x = [g.b[0] + fwd[0][0] * y1 + fwd[0][1] * y2, g.b[1] + fwd[1][1] * y2];
                let pv = p.eval(x);
                acc.add(pv * v.conj());
                mag += pv.norm() * v.norm();
            }
            Ok((acc.value(), mag))
        })
        .collect::<Result<_>>()?;
    let mut t = ComplexSum::new();
    let mut m = 0.0;
    for (v, s) in rows {
        t.add(v);
        m += s;
    }
    let pre = h * h * a.abs().powf(0.75);
    Ok(PolynomialWitness { value: t.value() * pre, scale: m * pre })
}

/// `(f, φ)` by direct evaluation: atoms through the interpolant's
/// derivatives, function terms and the polynomial by trapezoid sums on a
/// refined grid. Quadrature is accepted once two refinements agree.
pub fn pair_with_test(f: &LizorkinDistribution, phi: &SampledField2D) -> Result<Complex64> {
    f.validate()?;
    let coarse = pair_refined(f, phi, 4)?;
    let fine = pair_refined(f, phi, 8)?;
    let scale = pair_scale(f, phi);
    if (fine - coarse).norm() > 1e-6 * scale {
        return Err(ShearError::QuadratureNotConverged(format!(
            "test pairing changed by {:.3e} under refinement",
            (fine - coarse).norm()
        )));
    }
    Ok(fine)
}

fn pair_scale(f: &LizorkinDistribution, phi: &SampledField2D) -> f64 {
    let coeffs: f64 = f.atoms.iter().map(|a| a.coeff.norm()).chain(f.func_terms.iter().map(|t| t.coeff.norm())).chain(f.poly.terms.iter().map(|t| t.1.norm())).sum();
    coeffs.max(1e-300) * phi.sup().max(1e-300) * (1.0 + phi.grid.period()[0] * phi.grid.period()[1])
}

fn pair_refined(f: &LizorkinDistribution, phi: &SampledField2D, factor: usize) -> Result<Complex64> {
    let grid = phi.grid;
    let mut acc = ComplexSum::new();
    for at in &f.atoms {
        let sign = if at.deriv.order() % 2 == 0 { 1.0 } else { -1.0 };
        let v = TrigInterpolant::new(phi).eval_deriv(at.location, at.deriv.as_array());
        acc.add(at.coeff * sign * v);
    }
    let fine = Grid2D::new(
        grid.n1 * factor,
        grid.n2 * factor,
        grid.origin,
        [grid.spacing[0] / factor as f64, grid.spacing[1] / factor as f64],
    )?;
    let x1s: Vec<f64> = (0..fine.n1).map(|i| fine.x1(i)).collect();
    let x2s: Vec<f64> = (0..fine.n2).map(|i| fine.x2(i)).collect();
    let on_fine = |m: MultiIndex| -> Vec<Complex64> {
        let d = if m.order() == 0 { phi.clone() } else { spectral_derivative(phi, m.as_array()) };
        TrigInterpolant::new(&d).eval_tensor(&x1s, &x2s)
    };
    let cell = fine.cell_area();
    for t in &f.func_terms {
        let sign = if t.deriv.order() % 2 == 0 { 1.0 } else { -1.0 };
        let v = match &t.g {
            Registry::Sampled(gf) => {
                grid.check_same(&gf.grid)?;
                let d = if t.deriv.order() == 0 { phi.clone() } else { spectral_derivative(phi, t.deriv.as_array()) };
                gf.bilinear(&d)?
            }
            Registry::Ramp => {
                let d = if t.deriv.order() == 0 { phi.clone() } else { spectral_derivative(phi, t.deriv.as_array()) };
                ramp_pairing(&d)
            }
            g => {
                let d = on_fine(t.deriv);
                let mut s = ComplexSum::new();
                for (i, dv) in d.iter().enumerate() {
                    s.add(g.value([x1s[i % fine.n1], x2s[i / fine.n1]]) * dv);
                }
                s.value() * cell
            }
        };
        acc.add(t.coeff * sign * v);
    }
    if !f.poly.terms.is_empty() {
        let d = on_fine(MultiIndex::new(0, 0));
        let mut s = ComplexSum::new();
        for (i, dv) in d.iter().enumerate() {
            s.add(f.poly.eval([x1s[i % fine.n1], x2s[i / fine.n1]]) * dv);
        }
        acc.add(s.value() * cell);
    }
    Ok(acc.value())
}

/// `∫ max(x1, 0) φ(x) dx`, exact for the trigonometric interpolant: the
/// `x2` marginal is a trapezoid sum, the `x1` integral of `x1 Φ(x1)` over
/// `[0, end of period]` is done term by term.
fn ramp_pairing(phi: &SampledField2D) -> Complex64 {
    let g = phi.grid;
    let (n1, n2) = (g.n1, g.n2);
    let h = g.spacing;
    let marg: Vec<Complex64> = (0..n1).map(|i| (0..n2).map(|j| phi.values[i + n1 * j]).sum::<Complex64>() * h[1]).collect();
    let period = n1 as f64 * h[0];
    let (x0, end) = (g.origin[0], g.origin[0] + period);
    if end <= 0.0 {
        return ZERO;
    }
    let lo = x0.max(0.0);
    // Φ(x) = (1/n) Σ_k F_k e^{iω_k (x − x0)}, Nyquist bin split evenly
    let mut acc = ComplexSum::new();
    let half = n1 / 2;
    for k in 0..n1 {
        let kk = if k <= half { k as i64 } else { k as i64 - n1 as i64 };
        let mut fk = ZERO;
        for (j, m) in marg.iter().enumerate() {
            fk += m * cis(-2.0 * PI * (kk * j as i64) as f64 / n1 as f64);
        }
        fk /= n1 as f64;
        let freqs: Vec<(f64, f64)> = if n1 % 2 == 0 && k == half {
            vec![(kk as f64, 0.5), (-(kk as f64), 0.5)]
        } else {
            vec![(kk as f64, 1.0)]
        };
        for (q, share) in freqs {
            let w = 2.0 * PI * q / period;
            // ∫_lo^end x e^{iω(x − x0)} dx
            let prim = |x: f64| -> Complex64 {
                if w == 0.0 {
                    Complex64::new(0.5 * x * x, 0.0)
                } else {
                    let iw = Complex64::new(0.0, w);
                    cis(w * (x - x0)) * (x / iw + 1.0 / (w * w))
                }
            };
            acc.add(fk * share * (prim(end) - prim(lo)));
        }
    }
    acc.value()
}

/// The spectrum of `f` as a density on the dual grid of `grid`, consistent
/// with the periodic sampled world: point and line measures are divided by
/// the bin area or width. Bins with `|ξ1| ≤ cut` are left at zero.
pub fn grid_spectrum(f: &LizorkinDistribution, grid: Grid2D, cut: f64) -> Result<Vec<Complex64>> {
    f.validate()?;
    let frame = SpectralFrame::new(grid);
    let freq = grid.dual();
    let (d1, d2) = (freq.spacing[0], freq.spacing[1]);
    let xis: Vec<[f64; 2]> = (0..freq.len()).map(|i| freq.point(i)).collect();
    let mut out = vec![ZERO; freq.len()];
    let keep = |xi: [f64; 2]| xi[0].abs() > cut;
    for at in &f.atoms {
        let x0 = at.location;
        for (o, &xi) in out.iter_mut().zip(&xis) {
            if keep(xi) {
                *o += at.coeff * two_pi_i_pow(xi, at.deriv) * cis(-2.0 * PI * (x0[0] * xi[0] + x0[1] * xi[1]));
            }
        }
    }
    for t in &f.func_terms {
        match &t.g {
            Registry::Sampled(gf) if gf.grid.same_as(&grid) => {
                let mut v = gf.values.clone();
                frame.forward_in_place(&mut v);
                for ((o, &xi), s) in out.iter_mut().zip(&xis).zip(v) {
                    if keep(xi) {
                        *o += t.coeff * two_pi_i_pow(xi, t.deriv) * s;
                    }
                }
            }
            Registry::Ramp => {
                if t.deriv.m2 > 0 {
                    continue;
                }
                let row = freq.n2 / 2;
                for k1 in 0..freq.n1 {
                    let xi = xis[k1 + freq.n1 * row];
                    if keep(xi) {
                        out[k1 + freq.n1 * row] += t.coeff * two_pi_i_pow(xi, t.deriv) * (ramp_density(xi[0]) / d2);
                    }
                }
            }
            Registry::Sinusoid { freq: k, phase } => {
                for (sg, ph) in [(1.0, *phase), (-1.0, -*phase)] {
                    let kk = [sg * k[0], sg * k[1]];
                    let j1 = (kk[0] - freq.origin[0]) / d1;
                    let j2 = (kk[1] - freq.origin[1]) / d2;
                    let (r1, r2) = (j1.round(), j2.round());
                    if (j1 - r1).abs() > 1e-9 || (j2 - r2).abs() > 1e-9 || r1 < 0.0 || r2 < 0.0 || r1 as usize >= freq.n1 || r2 as usize >= freq.n2 {
                        return Err(ShearError::InvalidArgument(format!("sinusoid frequency {k:?} is not a bin of the dual grid")));
                    }
                    let i = r1 as usize + freq.n1 * r2 as usize;
                    if keep(xis[i]) {
                        out[i] += t.coeff * 0.5 * cis(ph) * two_pi_i_pow(kk, t.deriv) / (d1 * d2);
                    }
                }
            }
            g => {
                for (o, &xi) in out.iter_mut().zip(&xis) {
                    if keep(xi) {
                        *o += t.coeff * two_pi_i_pow(xi, t.deriv) * g.density(xi).unwrap_or(ZERO);
                    }
                }
            }
        }
    }
    Ok(out)
}

fn warp(s: f64, a: f64, xi: [f64; 2]) -> [f64; 2] {
    let r = a.abs().sqrt();
    [a * xi[0], a / r * (xi[1] - s * xi[0])]
}

/// `(1/C_{ψ,φ}) ∫ S_ψ f · S_{φ̄} test dμ` over `pgrid`, with both
/// coefficient slices taken as periodic functions of `b` on the test's grid.
pub fn desingularized_pairing(
    f: &LizorkinDistribution,
    psi: &ShearletGenerator,
    phi: &ShearletGenerator,
    test: &SampledField2D,
    pgrid: &ParamGrid,
) -> Result<Complex64> {
    pgrid.b_grid.check_same(&test.grid)?;
    let c = admissibility_constant(psi, phi, 2)?;
    if c.norm() == 0.0 {
        return Err(ShearError::NotAdmissible("C_ψφ = 0".into()));
    }
    let cov = coverage(test, psi, phi, pgrid)?;
    if cov.uncovered_fraction > COVERAGE_TOL {
        return Err(ShearError::CoverageGap { uncovered_fraction: cov.uncovered_fraction });
    }
    let amax = pgrid.a_values.iter().map(|a| a.abs()).fold(0.0, f64::max);
    let cut = 0.5 * psi.strip_halfwidth() / amax;
    let fspec = grid_spectrum(f, test.grid, cut)?;
    let frame = SpectralFrame::new(test.grid);
    let mut tspec = test.values.clone();
    frame.forward_in_place(&mut tspec);
    let freq = test.grid.dual();
    let xis: Vec<[f64; 2]> = (0..freq.len()).map(|i| freq.point(i)).collect();
    let phi_bar = phi.conj();
    let cell = test.grid.cell_area();
    let ns = pgrid.ns();
    let parts: Vec<Complex64> = (0..pgrid.slices())
        .into_par_iter()
        .map(|k| {
            let (is, ia) = (k % ns, k / ns);
            let (s, a) = (pgrid.s_values[is], pgrid.a_values[ia]);
            let pre = a.abs().powf(0.75);
            let mut x = vec![ZERO; xis.len()];
            let mut y = vec![ZERO; xis.len()];
            let mut any = false;
            for (i, xi) in xis.iter().enumerate() {
                let eta = warp(s, a, *xi);
                let q = psi.value(eta);
                if q != ZERO {
                    x[i] = fspec[i] * q.conj() * pre;
                    any = true;
                }
                let p = phi_bar.value(eta);
                if p != ZERO {
                    y[i] = tspec[i] * p.conj() * pre;
                }
            }
            if !any {
                return ZERO;
            }
            frame.inverse_in_place(&mut x);
            frame.inverse_in_place(&mut y);
            let mut acc = ComplexSum::new();
            for (u, v) in x.iter().zip(&y) {
                acc.add(u * v);
            }
            acc.value() * (pgrid.weight(is, ia) * cell)
        })
        .collect();
    let mut t = ComplexSum::new();
    for p in parts {
        t.add(p);
    }
    Ok(t.value() / c)
}

/// `(S_ψᵗΨ, test) := (Ψ, S_{ψ̄} test)_{L²(dμ)}` (bilinear) for a test
/// passing the Lizorkin surrogate.
pub fn synthesize_distribution(psi_vol: &CoefficientVolume, gen: &ShearletGenerator, test: &SampledField2D) -> Result<Complex64> {
    let mom = moments(test, 6)?;
    if mom.max_abs > 1e-6 * test.norm_l2().max(1.0) {
        return Err(ShearError::NotLizorkin { max_abs: mom.max_abs });
    }
    let t = crate::analysis::transform_spectral(test, &gen.conj(), &psi_vol.pgrid)?;
    haar_pairing(psi_vol, &t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::default_generator;

    #[test]
    fn term_limit_and_order_cap() {
        let mut f = LizorkinDistribution::new();
        for _ in 0..65 {
            f = f.with_atom(Complex64::new(1.0, 0.0), [0.0, 0.0], MultiIndex::new(0, 0));
        }
        assert!(matches!(f.validate(), Err(ShearError::TooManyTerms(65))));
        let g = LizorkinDistribution::new().with_atom(Complex64::new(1.0, 0.0), [0.0, 0.0], MultiIndex::new(3, 2));
        assert!(matches!(g.validate(), Err(ShearError::OrderTooHigh { .. })));
    }

    #[test]
    fn gaussian_control_generator_is_refused() {
        let gc = crate::generator::gaussian_control();
        let r = transform_distribution(&LizorkinDistribution::delta([0.0, 0.0]), &gc, &[GroupElement::identity()]);
        assert!(r.is_err());
    }

    #[test]
    fn polynomial_only_transform_is_zero() {
        let p = Polynomial { terms: vec![(MultiIndex::new(2, 1), Complex64::new(1.0, 0.0))] };
        let f = LizorkinDistribution::new().with_poly(p);
        let v = transform_distribution(&f, &default_generator(), &[GroupElement::identity()]).unwrap();
        assert_eq!(v[0], ZERO);
    }
}
