//! Shearlet generators given by closed-form frequency profiles.
//!
//! The Meyer-type generator is `ψ̂(ξ) = w(|ξ1|) v(ξ2/ξ1)`: `w` is a smooth
//! band bump equal to 1 on `[r1_in, r1_out]` and 0 outside
//! `[r0_in, r0_out]`, `v` a smooth cone bump on `[-c, c]` equal to 1 on
//! `[-c/2, c/2]`. It vanishes on the strip `|ξ1| ≤ r0_in`, so every
//! derivative of `ψ̂` vanishes at the origin and `ψ` has no moments.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, ShearError};
use crate::jet::Jet;
use crate::quadrature::{composite_rule, ComplexSum};

/// Default cap on derivative and moment orders.
pub const DEFAULT_MAX_ORDER: usize = 10;

const GL_ORDER: usize = 16;

/// Which half-plane of `ξ1` a generator lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Both,
    Positive,
    Negative,
}

impl Side {
    fn admits(self, xi1: f64) -> bool {
        match self {
            Side::Both => true,
            Side::Positive => xi1 > 0.0,
            Side::Negative => xi1 < 0.0,
        }
    }

    fn flipped(self) -> Side {
        match self {
            Side::Both => Side::Both,
            Side::Positive => Side::Negative,
            Side::Negative => Side::Positive,
        }
    }

    fn signs(self) -> &'static [f64] {
        match self {
            Side::Both => &[-1.0, 1.0],
            Side::Positive => &[1.0],
            Side::Negative => &[-1.0],
        }
    }
}

/// The real part of a generator's spectrum before shift and conjugation.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// Cone bump on the band `[r0_in, r1_in, r1_out, r0_out]`.
    Meyer { band: [f64; 4], cone: f64, side: Side },
    /// `e^{-π|ξ|²}`: smooth but not Lizorkin, kept as a negative control.
    Gaussian,
}

/// A shearlet generator: `ψ̂(ξ) = P(±ξ) e^{-2πiξ·shift}`, where the sign
/// flips when `conjugated` (the spectrum of `conj(ψ)` is `conj(ψ̂(−ξ))`).
#[derive(Debug, Clone, PartialEq)]
pub struct ShearletGenerator {
    pub profile: Profile,
    pub shift: [f64; 2],
    pub conjugated: bool,
    pub max_order: usize,
}

/// `S(t) = 1/(1 + e^{1/t − 1/(1−t)})`, the C^∞ step from 0 to 1 on `[0, 1]`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let g = 1.0 / t - 1.0 / (1.0 - t);
        1.0 / (1.0 + g.exp())
    }
}

fn smooth_step_jet(t: &Jet) -> Jet {
    let d = t.order();
    let v = t.value();
    if v <= 0.0 {
        return Jet::constant(0.0, d);
    }
    if v >= 1.0 {
        return Jet::constant(1.0, d);
    }
    let g = t.recip().sub(&t.scale(-1.0).add_const(1.0).recip());
    if g.value() > 700.0 {
        return Jet::constant(0.0, d);
    }
    if g.value() < -700.0 {
        return Jet::constant(1.0, d);
    }
    g.exp().add_const(1.0).recip()
}

/// Band bump `w(r)`.
pub fn band_bump(r: f64, band: &[f64; 4]) -> f64 {
    let [r0i, r1i, r1o, r0o] = *band;
    if r <= r0i || r >= r0o {
        return 0.0;
    }
    smooth_step((r - r0i) / (r1i - r0i)) * (1.0 - smooth_step((r - r1o) / (r0o - r1o)))
}

/// Cone bump `v(u)`.
pub fn cone_bump(u: f64, cone: f64) -> f64 {
    1.0 - smooth_step(2.0 * u.abs() / cone - 1.0)
}

fn band_bump_jet(r: &Jet, band: &[f64; 4]) -> Jet {
    let [r0i, r1i, r1o, r0o] = *band;
    let d = r.order();
    let v = r.value();
    if v <= r0i || v >= r0o {
        return Jet::constant(0.0, d);
    }
    let up = smooth_step_jet(&r.add_const(-r0i).scale(1.0 / (r1i - r0i)));
    let down = smooth_step_jet(&r.add_const(-r1o).scale(1.0 / (r0o - r1o)));
    up.mul(&down.scale(-1.0).add_const(1.0))
}

fn cone_bump_jet(u: &Jet, cone: f64) -> Jet {
    let d = u.order();
    let au = if u.value() < 0.0 { u.scale(-1.0) } else { u.clone() };
    if au.value() <= 0.5 * cone {
        return Jet::constant(1.0, d);
    }
    smooth_step_jet(&au.scale(2.0 / cone).add_const(-1.0)).scale(-1.0).add_const(1.0)
}

fn cis(t: f64) -> Complex64 {
    Complex64::new(t.cos(), t.sin())
}

fn validate_band(band: &[f64; 4], cone: f64) -> Result<()> {
    let ok = band.iter().all(|v| v.is_finite())
        && 0.0 < band[0]
        && band[0] < band[1]
        && band[1] < band[2]
        && band[2] < band[3];
    if !ok {
        return Err(ShearError::BadBandEdges(format!("need 0 < r0_in < r1_in < r1_out < r0_out, got {band:?}")));
    }
    if !(cone > 0.0 && cone <= 2.0) {
        return Err(ShearError::BadBandEdges(format!("cone half-width must lie in (0, 2], got {cone}")));
    }
    Ok(())
}

/// The default Meyer-type generator family.
pub fn make_meyer_shearlet(band: [f64; 4], cone_halfwidth: f64) -> Result<ShearletGenerator> {
    make_meyer_shearlet_sided(band, cone_halfwidth, Side::Both)
}

/// Meyer-type generator supported on one half-plane of `ξ1` (complex-valued in space).
pub fn make_meyer_shearlet_sided(band: [f64; 4], cone_halfwidth: f64, side: Side) -> Result<ShearletGenerator> {
    validate_band(&band, cone_halfwidth)?;
    Ok(ShearletGenerator {
        profile: Profile::Meyer { band, cone: cone_halfwidth, side },
        shift: [0.0, 0.0],
        conjugated: false,
        max_order: DEFAULT_MAX_ORDER,
    })
}

/// The default generator: band `[0.5, 0.75, 1.5, 2]`, cone half-width 1.
pub fn default_generator() -> ShearletGenerator {
    make_meyer_shearlet([0.5, 0.75, 1.5, 2.0], 1.0).expect("valid default band")
}

/// `ψ̂(ξ) = e^{-π|ξ|²}`, which violates admissibility.
pub fn gaussian_control() -> ShearletGenerator {
    ShearletGenerator { profile: Profile::Gaussian, shift: [0.0, 0.0], conjugated: false, max_order: DEFAULT_MAX_ORDER }
}

impl ShearletGenerator {
    /// The generator translated in space by `x_c`.
    pub fn shifted(&self, x_c: [f64; 2]) -> Self {
        let mut g = self.clone();
        g.shift = [self.shift[0] + x_c[0], self.shift[1] + x_c[1]];
        g
    }

    /// The generator of `conj(ψ)`.
    pub fn conj(&self) -> Self {
        let mut g = self.clone();
        g.conjugated = !g.conjugated;
        g
    }

    /// Width of the strip `|ξ1| ≤ r0` on which the profile vanishes.
    pub fn strip_halfwidth(&self) -> f64 {
        match &self.profile {
            Profile::Meyer { band, .. } => band[0],
            Profile::Gaussian => 0.0,
        }
    }

    /// True for profiles vanishing near `ξ1 = 0` (exact Lizorkin membership).
    pub fn is_lizorkin(&self) -> bool {
        self.strip_halfwidth() > 0.0
    }

    fn effective_side(&self) -> Side {
        match &self.profile {
            Profile::Meyer { side, .. } => {
                if self.conjugated {
                    side.flipped()
                } else {
                    *side
                }
            }
            Profile::Gaussian => Side::Both,
        }
    }

    /// Support description in `(|ξ1|, u = ξ2/ξ1)`: band, cone, sign set.
    /// `None` for profiles without compact support.
    pub fn support(&self) -> Option<([f64; 4], f64, Side)> {
        match &self.profile {
            Profile::Meyer { band, cone, .. } => Some((*band, *cone, self.effective_side())),
            Profile::Gaussian => None,
        }
    }

    fn base_value(&self, xi: [f64; 2]) -> f64 {
        match &self.profile {
            Profile::Meyer { band, cone, side } => {
                if !side.admits(xi[0]) {
                    return 0.0;
                }
                let r = xi[0].abs();
                if r <= band[0] || r >= band[3] {
                    return 0.0;
                }
                let u = xi[1] / xi[0];
                if u.abs() >= *cone {
                    return 0.0;
                }
                band_bump(r, band) * cone_bump(u, *cone)
            }
            Profile::Gaussian => (-PI * (xi[0] * xi[0] + xi[1] * xi[1])).exp(),
        }
    }

    fn base_jet(&self, xi: [f64; 2], order: usize) -> Jet {
        match &self.profile {
            Profile::Meyer { band, cone, side } => {
                if !side.admits(xi[0]) || xi[0].abs() <= band[0] || xi[0].abs() >= band[3] {
                    return Jet::constant(0.0, order);
                }
                if (xi[1] / xi[0]).abs() >= *cone {
                    return Jet::constant(0.0, order);
                }
                let x1 = Jet::variable(xi[0], 0, order);
                let x2 = Jet::variable(xi[1], 1, order);
                let r = if xi[0] < 0.0 { x1.scale(-1.0) } else { x1.clone() };
                let u = x2.div(&x1);
                band_bump_jet(&r, band).mul(&cone_bump_jet(&u, *cone))
            }
            Profile::Gaussian => {
                let x1 = Jet::variable(xi[0], 0, order);
                let x2 = Jet::variable(xi[1], 1, order);
                x1.mul(&x1).add(&x2.mul(&x2)).scale(-PI).exp()
            }
        }
    }

    /// `ψ̂(ξ)`, the fast path used by the transforms.
    #[inline]
    pub fn value(&self, xi: [f64; 2]) -> Complex64 {
        let p = if self.conjugated { self.base_value([-xi[0], -xi[1]]) } else { self.base_value(xi) };
        if p == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if self.shift == [0.0, 0.0] {
            Complex64::new(p, 0.0)
        } else {
            cis(-2.0 * PI * (xi[0] * self.shift[0] + xi[1] * self.shift[1])) * p
        }
    }

    /// `∂^m ψ̂(ξ)` in closed form.
    pub fn derivative(&self, xi: [f64; 2], m: [usize; 2]) -> Result<Complex64> {
        let order = m[0] + m[1];
        if order > self.max_order {
            return Err(ShearError::OrderTooHigh { order, max: self.max_order });
        }
        if order == 0 {
            return Ok(self.value(xi));
        }
        let (arg, sign) = if self.conjugated { ([-xi[0], -xi[1]], -1.0f64) } else { (xi, 1.0) };
        let jet = self.base_jet(arg, order);
        // ∂^k[P(σξ)] = σ^{|k|} (∂^k P)(σξ); Leibniz against e^{-2πiξ·shift}
        let e = cis(-2.0 * PI * (xi[0] * self.shift[0] + xi[1] * self.shift[1]));
        let c = [Complex64::new(0.0, -2.0 * PI * self.shift[0]), Complex64::new(0.0, -2.0 * PI * self.shift[1])];
        let mut acc = Complex64::new(0.0, 0.0);
        for k1 in 0..=m[0] {
            for k2 in 0..=m[1] {
                let dp = jet.derivative(k1, k2) * sign.powi((k1 + k2) as i32);
                if dp == 0.0 {
                    continue;
                }
                let binom = binomial(m[0], k1) * binomial(m[1], k2);
                acc += c[0].powu((m[0] - k1) as u32) * c[1].powu((m[1] - k2) as u32) * dp * binom;
            }
        }
        Ok(acc * e)
    }
}

pub fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `∂^deriv ψ̂(ξ)`; exactly zero outside the support.
pub fn eval_profile(gen: &ShearletGenerator, xi: [f64; 2], deriv: [usize; 2]) -> Result<Complex64> {
    gen.derivative(xi, deriv)
}

/// `∂^k e^{-πx²}` via Hermite polynomials.
pub(crate) fn gaussian_deriv_1d(x: f64, k: usize) -> f64 {
    let sp = PI.sqrt();
    let y = sp * x;
    let (mut h0, mut h1) = (1.0, 2.0 * y);
    let hk = if k == 0 {
        1.0
    } else {
        for j in 1..k {
            let h2 = 2.0 * y * h1 - 2.0 * j as f64 * h0;
            h0 = h1;
            h1 = h2;
        }
        h1
    };
    (-sp).powi(k as i32) * hk * (-PI * x * x).exp()
}

/// Uniform table of `V̌_m(y) = ∫ v(u) u^m e^{2πiyu} du`, read back by local
/// Lagrange interpolation.
#[derive(Debug, Clone)]
struct ConeTable {
    y_max: f64,
    dy: f64,
    vals: Vec<Complex64>,
}

const TABLE_STENCIL: usize = 12;

impl ConeTable {
    fn build(cone: f64, m: usize, y_max: f64, refine: usize) -> Self {
        // The integrand has bandwidth `cone` in y; 20 samples per unit period.
        let dy = 1.0 / (20.0 * cone);
        let n = (2.0 * y_max / dy).ceil() as usize + TABLE_STENCIL + 2;
        let y0 = -((n / 2) as f64) * dy;
        let panels = refine * (4 + (2.0 * PI * y_max * cone / 6.0).ceil() as usize);
        let (u, wu) = composite_rule(&[-cone, -0.5 * cone, 0.5 * cone, cone], panels, GL_ORDER);
        let weights: Vec<f64> = u.iter().zip(&wu).map(|(&u, &w)| w * cone_bump(u, cone) * u.powi(m as i32)).collect();
        let vals: Vec<Complex64> = (0..n)
            .into_par_iter()
            .map(|k| {
                let y = y0 + k as f64 * dy;
                let mut acc = ComplexSum::new();
                for (&u, &w) in u.iter().zip(&weights) {
                    acc.add(cis(2.0 * PI * y * u) * w);
                }
                acc.value()
            })
            .collect();
        ConeTable { y_max: -y0, dy, vals }
    }

    fn eval(&self, y: f64) -> Complex64 {
        let t = (y + self.y_max) / self.dy;
        let half = TABLE_STENCIL / 2;
        let base = (t.floor() as isize - half as isize + 1).clamp(0, (self.vals.len() - TABLE_STENCIL) as isize) as usize;
        let s = t - base as f64;
        // barycentric weights for equispaced nodes: (-1)^j C(n-1, j)
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = 0.0;
        for j in 0..TABLE_STENCIL {
            let d = s - j as f64;
            if d.abs() < 1e-14 {
                return self.vals[base + j];
            }
            let w = if j % 2 == 0 { 1.0 } else { -1.0 } * binomial(TABLE_STENCIL - 1, j) / d;
            num += self.vals[base + j] * w;
            den += w;
        }
        num / den
    }
}

/// Quadrature evaluator of `∂^m ψ(x) = ∫ (2πiξ)^m ψ̂(ξ) e^{2πixξ} dξ` for
/// `|x1| + c|x2| ≤ radius`.
///
/// In the coordinates `(ξ1, u = ξ2/ξ1)` the Meyer profile factorises, so
/// the inner `u` integral is a tabulated function of `x2 ξ1`; the outer
/// `ξ1` integral is composite Gauss–Legendre.
#[derive(Debug, Clone)]
pub struct SpaceEvaluator {
    gen: ShearletGenerator,
    pub radius: f64,
    max_deriv: usize,
    xi1: Vec<f64>,
    wt: Vec<f64>,
    tables: Vec<ConeTable>,
}

impl SpaceEvaluator {
    /// Evaluator accurate on `|x1| + c|x2| ≤ radius` for derivative orders
    /// up to `max_deriv`. `refine` multiplies every panel count.
    pub fn new(gen: &ShearletGenerator, radius: f64, max_deriv: usize, refine: usize) -> Result<Self> {
        if max_deriv > gen.max_order {
            return Err(ShearError::OrderTooHigh { order: max_deriv, max: gen.max_order });
        }
        let radius = radius.max(1.0);
        let (xi1, wt, tables) = match gen.support() {
            Some((band, cone, _)) => {
                let side = match &gen.profile {
                    Profile::Meyer { side, .. } => *side,
                    Profile::Gaussian => Side::Both,
                };
                let omega = 2.0 * PI * radius;
                let mut xi1 = Vec::new();
                let mut wt = Vec::new();
                for &sg in side.signs() {
                    for k in 0..3 {
                        let (lo, hi) = (band[k], band[k + 1]);
                        let base = if k == 1 { 2 } else { 6 };
                        let panels = refine * (base + ((hi - lo) * omega / 6.0).ceil() as usize);
                        let (x, w) = composite_rule(&[lo, hi], panels, GL_ORDER);
                        for (r, wr) in x.into_iter().zip(w) {
                            xi1.push(sg * r);
                            wt.push(wr * band_bump(r, &band) * r);
                        }
                    }
                }
                let y_max = radius * band[3] / cone.max(1e-3) + 2.0;
                let tables = (0..=max_deriv).map(|m| ConeTable::build(cone, m, y_max, refine)).collect();
                (xi1, wt, tables)
            }
            None => (Vec::new(), Vec::new(), Vec::new()),
        };
        Ok(Self { gen: gen.clone(), radius, max_deriv, xi1, wt, tables })
    }

    /// Panel counts verified so that doubling them changes values by at
    /// most `tol` at probe points on the evaluation disc.
    pub fn converged(gen: &ShearletGenerator, radius: f64, max_deriv: usize, tol: f64) -> Result<Self> {
        let probes = [[0.0, 0.0], [radius, 0.0], [0.0, radius * 0.7], [radius * 0.5, -radius * 0.3], [-1.3, 0.7]];
        let mut refine = 1;
        let mut cur = Self::new(gen, radius, max_deriv, refine)?;
        loop {
            let next = Self::new(gen, radius, max_deriv, refine * 2)?;
            let mut diff = 0.0f64;
            for p in probes {
                for m in [[0, 0], [max_deriv, 0], [0, max_deriv]] {
                    diff = diff.max((cur.eval(p, m)? - next.eval(p, m)?).norm());
                }
            }
            if diff <= tol {
                return Ok(cur);
            }
            if refine >= 8 {
                return Err(ShearError::QuadratureNotConverged(format!(
                    "space evaluation at radius {radius}: refinement change {diff:.3e}"
                )));
            }
            refine *= 2;
            cur = next;
        }
    }

    fn check_order(&self, m: [usize; 2]) -> Result<()> {
        let order = m[0] + m[1];
        if order > self.max_deriv {
            return Err(ShearError::OrderTooHigh { order, max: self.max_deriv });
        }
        Ok(())
    }

    /// Per-node weights `W_i ξ1^{|m|} V̌_{m2}(x2 ξ1)` for a fixed `x2`
    /// of the unconjugated, unshifted profile.
    fn row_weights(&self, x2: f64, m: [usize; 2]) -> Vec<Complex64> {
        let tab = &self.tables[m[1]];
        let k = (m[0] + m[1]) as i32;
        self.xi1.iter().zip(&self.wt).map(|(&x, &w)| tab.eval(x2 * x) * (w * x.powi(k))).collect()
    }

    fn base_eval(&self, x: [f64; 2], m: [usize; 2]) -> Complex64 {
        match self.gen.profile {
            Profile::Gaussian => Complex64::new(gaussian_deriv_1d(x[0], m[0]) * gaussian_deriv_1d(x[1], m[1]), 0.0),
            Profile::Meyer { .. } => {
                let g = self.row_weights(x[1], m);
                let mut acc = ComplexSum::new();
                for (gi, &xi) in g.iter().zip(&self.xi1) {
                    acc.add(gi * cis(2.0 * PI * x[0] * xi));
                }
                acc.value() * Complex64::new(0.0, 2.0 * PI).powu((m[0] + m[1]) as u32)
            }
        }
    }

    /// `∂^m ψ(x)`.
    pub fn eval(&self, x: [f64; 2], m: [usize; 2]) -> Result<Complex64> {
        self.check_order(m)?;
        let y = [x[0] - self.gen.shift[0], x[1] - self.gen.shift[1]];
        let v = self.base_eval(y, m);
        Ok(if self.gen.conjugated { v.conj() } else { v })
    }

    /// `∂^m ψ` along the row `x2`, at `x1 = x1_start + k·dx1`, `k < count`.
    pub fn eval_row(&self, x2: f64, x1_start: f64, dx1: f64, count: usize, m: [usize; 2]) -> Result<Vec<Complex64>> {
        self.check_order(m)?;
        let y2 = x2 - self.gen.shift[1];
        let y1 = x1_start - self.gen.shift[0];
        let out: Vec<Complex64> = match self.gen.profile {
            Profile::Gaussian => (0..count)
                .map(|k| Complex64::new(gaussian_deriv_1d(y1 + k as f64 * dx1, m[0]) * gaussian_deriv_1d(y2, m[1]), 0.0))
                .collect(),
            Profile::Meyer { .. } => {
                let g = self.row_weights(y2, m);
                let mut phase: Vec<Complex64> = self.xi1.iter().map(|&xi| cis(2.0 * PI * y1 * xi)).collect();
                let step: Vec<Complex64> = self.xi1.iter().map(|&xi| cis(2.0 * PI * dx1 * xi)).collect();
                let pre = Complex64::new(0.0, 2.0 * PI).powu((m[0] + m[1]) as u32);
                let mut out = Vec::with_capacity(count);
                for k in 0..count {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for ((gi, p), s) in g.iter().zip(phase.iter_mut()).zip(&step) {
                        acc += gi * *p;
                        *p *= s;
                    }
                    out.push(acc * pre);
                    // re-anchor phases periodically to bound drift
                    if (k + 1) % 64 == 0 {
                        let x1 = y1 + (k + 1) as f64 * dx1;
                        for (p, &xi) in phase.iter_mut().zip(&self.xi1) {
                            *p = cis(2.0 * PI * x1 * xi);
                        }
                    }
                }
                out
            }
        };
        Ok(if self.gen.conjugated { out.into_iter().map(|v| v.conj()).collect() } else { out })
    }

    pub fn generator(&self) -> &ShearletGenerator {
        &self.gen
    }
}

/// `∂^deriv ψ(x)` by frequency-domain quadrature with verified refinement.
pub fn eval_space(gen: &ShearletGenerator, x: [f64; 2], deriv: [usize; 2]) -> Result<Complex64> {
    let order = deriv[0] + deriv[1];
    if order > gen.max_order {
        return Err(ShearError::OrderTooHigh { order, max: gen.max_order });
    }
    let y = [x[0] - gen.shift[0], x[1] - gen.shift[1]];
    let radius = y[0].abs() + y[1].abs() + 1.0;
    SpaceEvaluator::converged(gen, radius, order, 1e-9)?.eval(x, deriv)
}

/// `max |ψ(x)|` over 64 directions on each circle `|x| = r`.
pub fn decay_table(gen: &ShearletGenerator, radii: &[f64]) -> Result<Vec<(f64, f64)>> {
    let rmax = radii.iter().cloned().fold(1.0, f64::max);
    let ev = SpaceEvaluator::new(gen, 2.0 * rmax + 2.0, 0, 1)?;
    radii
        .iter()
        .map(|&r| {
            let mut m = 0.0f64;
            for k in 0..64 {
                let t = 2.0 * PI * k as f64 / 64.0;
                let x = [gen.shift[0] + r * t.cos(), gen.shift[1] + r * t.sin()];
                m = m.max(ev.eval(x, [0, 0])?.norm());
            }
            Ok((r, m))
        })
        .collect()
}

/// Quadrature nodes `(ξ, weight)` covering the joint support of the given
/// compactly supported generators; `None` if some generator has no compact
/// support. Coordinates are `(ξ1, u)` with `ξ2 = u ξ1`, `dξ = |ξ1| dξ1 du`.
pub fn joint_support_nodes(gens: &[&ShearletGenerator], refine: usize) -> Option<Vec<([f64; 2], f64)>> {
    support_nodes(gens, 6 * refine)
}

/// As [`joint_support_nodes`] with an explicit number of Gauss–Legendre
/// panels per smooth piece.
pub fn support_nodes(gens: &[&ShearletGenerator], panels: usize) -> Option<Vec<([f64; 2], f64)>> {
    support_nodes_split(gens, panels, panels)
}

/// As [`support_nodes`] with separate panel counts along `|ξ1|` and `u`.
pub fn support_nodes_split(gens: &[&ShearletGenerator], panels_r: usize, panels_u: usize) -> Option<Vec<([f64; 2], f64)>> {
    let mut lo = 0.0f64;
    let mut hi = f64::INFINITY;
    let mut cone = f64::INFINITY;
    let mut allow_pos = true;
    let mut allow_neg = true;
    let mut r_breaks = Vec::new();
    let mut u_breaks = Vec::new();
    for g in gens {
        let (band, c, side) = g.support()?;
        lo = lo.max(band[0]);
        hi = hi.min(band[3]);
        cone = cone.min(c);
        r_breaks.extend_from_slice(&band);
        u_breaks.push(0.5 * c);
        allow_pos &= side != Side::Negative;
        allow_neg &= side != Side::Positive;
    }
    if lo >= hi {
        return Some(Vec::new());
    }
    let mut re: Vec<f64> = vec![lo, hi];
    re.extend(r_breaks.into_iter().filter(|&r| r > lo && r < hi));
    re.sort_by(f64::total_cmp);
    re.dedup();
    let mut ue: Vec<f64> = vec![-cone, cone];
    for b in u_breaks {
        if b < cone {
            ue.push(b);
            ue.push(-b);
        }
    }
    ue.sort_by(f64::total_cmp);
    ue.dedup();
    let (r, wr) = composite_rule(&re, panels_r, GL_ORDER);
    let (u, wu) = composite_rule(&ue, panels_u, GL_ORDER);
    let mut nodes = Vec::with_capacity(2 * r.len() * u.len());
    for sg in [-1.0, 1.0] {
        if (sg > 0.0 && !allow_pos) || (sg < 0.0 && !allow_neg) {
            continue;
        }
        for (&ri, &wi) in r.iter().zip(&wr) {
            let x1 = sg * ri;
            for (&uj, &wj) in u.iter().zip(&wu) {
                nodes.push(([x1, uj * x1], wi * wj * ri));
            }
        }
    }
    Some(nodes)
}

/// Result of the two-way admissibility computation.
#[derive(Debug, Clone)]
pub struct AdmissibilityReport {
    /// `C_{ψ,φ}` (method A).
    pub c_psi: Complex64,
    pub method_a: Complex64,
    /// The `(s, a)`-integral at each probe.
    pub method_b: Vec<Complex64>,
    pub probes: Vec<[f64; 2]>,
    /// Largest relative difference between method B and method A.
    pub max_discrepancy: f64,
    /// `(max − min)/|C|` of method B over the probes.
    pub probe_spread: f64,
    pub admissible: bool,
}

/// Dyadic-shell sums of `|conj(ψ̂)φ̂|/ξ1²` over `|ξ1| ∈ [2^{-k-1}, 2^{-k}]`.
pub fn shell_sums(psi: &ShearletGenerator, phi: &ShearletGenerator, shells: usize) -> Vec<f64> {
    let (gx, gw) = composite_rule(&[-8.0, -2.0, 0.0, 2.0, 8.0], 8, GL_ORDER);
    (1..=shells)
        .map(|k| {
            let (lo, hi) = (0.5f64.powi(k as i32 + 1), 0.5f64.powi(k as i32));
            let (rx, rw) = composite_rule(&[lo, hi], 2, GL_ORDER);
            let mut acc = 0.0;
            for sg in [-1.0, 1.0] {
                for (&r, &w1) in rx.iter().zip(&rw) {
                    let x1 = sg * r;
                    for (&x2, &w2) in gx.iter().zip(&gw) {
                        let v = (psi.value([x1, x2]).conj() * phi.value([x1, x2])).norm();
                        acc += w1 * w2 * v / (r * r);
                    }
                }
            }
            acc
        })
        .collect()
}

/// Shell sums that fail to decay: the last five ratios all exceed 1/2.
pub fn shells_diverge(sums: &[f64]) -> bool {
    let n = sums.len();
    if n < 6 || sums[n - 1] <= 0.0 {
        return false;
    }
    (n - 5..n).all(|k| sums[k] >= 0.5 * sums[k - 1])
}

/// Method A: `∫ conj(ψ̂) φ̂ / ξ1² dξ`.
pub fn admissibility_constant(psi: &ShearletGenerator, phi: &ShearletGenerator, refine: usize) -> Result<Complex64> {
    let nodes = joint_support_nodes(&[psi, phi], refine)
        .ok_or_else(|| ShearError::NotAdmissible("profile without compact support away from the ξ1 = 0 strip".into()))?;
    let mut acc = ComplexSum::new();
    for (xi, w) in nodes {
        acc.add(psi.value(xi).conj() * phi.value(xi) * (w / (xi[0] * xi[0])));
    }
    Ok(acc.value())
}

/// Method B at one frequency: `∫∫ conj(ψ̂(Mξ)) φ̂(Mξ) ds da / |a|^{3/2}`,
/// `M = A_a ᵗN_s`, with `a = ±2^t`, `|t| ≤ 8`.
pub fn admissibility_at(psi: &ShearletGenerator, phi: &ShearletGenerator, xi: [f64; 2], refine: usize) -> Result<Complex64> {
    if xi[0] == 0.0 {
        return Err(ShearError::InvalidArgument("probe frequency on ξ1 = 0".into()));
    }
    let (bp, cp, _) = psi.support().ok_or_else(|| ShearError::NotAdmissible("ψ not compactly supported".into()))?;
    let (bf, cf, _) = phi.support().ok_or_else(|| ShearError::NotAdmissible("φ not compactly supported".into()))?;
    let r = xi[0].abs();
    let u = xi[1] / xi[0];
    let (lo, hi) = (bp[0].max(bf[0]), bp[3].min(bf[3]));
    if lo >= hi {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let tl = (lo / r).log2().max(-8.0);
    let th = (hi / r).log2().min(8.0);
    if tl >= th {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut te = vec![tl, th];
    for e in bp.iter().chain(bf.iter()) {
        let t = (e / r).log2();
        if t > tl && t < th {
            te.push(t);
        }
    }
    te.sort_by(f64::total_cmp);
    te.dedup();
    let (tn, tw) = composite_rule(&te, 6 * refine, GL_ORDER);
    let cone = cp.min(cf);
    let mut total = ComplexSum::new();
    for sg in [-1.0, 1.0] {
        for (&t, &wt) in tn.iter().zip(&tw) {
            let a = sg * t.exp2();
            let q = a.abs().sqrt();
            // s-support: |u − s| ≤ cone·|a|^{1/2}
            let mut se = vec![u - cone * q, u + cone * q];
            for c in [cp, cf] {
                for k in [-0.5, 0.5] {
                    let s = u + k * c * q;
                    if s > se[0] && s < se[1] {
                        se.push(s);
                    }
                }
            }
            se.sort_by(f64::total_cmp);
            se.dedup();
            let (sn, sw) = composite_rule(&se, 4 * refine, GL_ORDER);
            let mut inner = ComplexSum::new();
            for (&s, &ws) in sn.iter().zip(&sw) {
                let eta = [a * xi[0], a / q * (xi[1] - s * xi[0])];
                inner.add(psi.value(eta).conj() * phi.value(eta) * ws);
            }
            // da/|a|^{3/2} = ln2 |a|^{-1/2} dt
            total.add(inner.value() * (wt * LN_2 / q));
        }
    }
    Ok(total.value())
}

/// Admissibility of the pair `(ψ, φ)` by both formulas.
pub fn admissibility(psi: &ShearletGenerator, phi: &ShearletGenerator, probe_xis: &[[f64; 2]]) -> Result<AdmissibilityReport> {
    let shells = shell_sums(psi, phi, 20);
    if shells_diverge(&shells) {
        return Err(ShearError::NotAdmissible(format!(
            "divergent near ξ1 = 0: dyadic shell sums {:.3e} → {:.3e}",
            shells[0],
            shells[shells.len() - 1]
        )));
    }
    let c = admissibility_constant(psi, phi, 4)?;
    let scale = (admissibility_constant(psi, psi, 4)?.norm() * admissibility_constant(phi, phi, 4)?.norm()).sqrt();
    if c.norm() <= 1e-12 * scale.max(f64::MIN_POSITIVE) || c.norm() == 0.0 {
        return Err(ShearError::NotAdmissible(format!("C_ψφ = {c:.3e} vanishes")));
    }
    let method_b: Vec<Complex64> = probe_xis
        .par_iter()
        .map(|&xi| admissibility_at(psi, phi, xi, 4))
        .collect::<Result<_>>()?;
    let max_discrepancy = method_b.iter().map(|b| (b - c).norm() / c.norm()).fold(0.0, f64::max);
    let mut spread = 0.0f64;
    for x in &method_b {
        for y in &method_b {
            spread = spread.max((x - y).norm());
        }
    }
    let probe_spread = spread / c.norm();
    Ok(AdmissibilityReport {
        c_psi: c,
        method_a: c,
        method_b,
        probes: probe_xis.to_vec(),
        max_discrepancy,
        probe_spread,
        admissible: c.is_finite() && max_discrepancy <= 1e-4,
    })
}
