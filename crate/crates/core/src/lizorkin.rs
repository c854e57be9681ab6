//! Lizorkin-space machinery on sampled fields: moments, Schwartz
//! seminorms, the closure operations and the antiderivative construction.
//!
//! Moments are read off the spectrum: `μ_m(f) = ∂^m f̂(0) / (−2πi)^{|m|}`,
//! with `∂^m f̂(0)` from a Fornberg stencil on the sampled spectrum. For a
//! field that stands for a trigonometric polynomial this is the moment of
//! the function itself; the raw spatial sum `Σ x^m f h²` is kept as
//! [`moments_spatial`] but is dominated by periodisation of slow tails.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, ShearError};
use crate::field::{fft_forward, fft_inverse, spectral_derivative, FrequencyField2D, Grid2D, SampledField2D, TrigInterpolant};
use crate::generator::DEFAULT_MAX_ORDER;
use crate::quadrature::{fornberg_weights, ComplexSum};

/// Default boundary-decay tolerance for fields claiming Schwartz decay.
pub const BOUNDARY_TOL: f64 = 1e-10;

/// Half-width of the finite-difference stencil used for spectral moments.
const STENCIL_HALF: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex {
    pub m1: usize,
    pub m2: usize,
}

impl MultiIndex {
    pub const fn new(m1: usize, m2: usize) -> Self {
        Self { m1, m2 }
    }

    pub fn order(&self) -> usize {
        self.m1 + self.m2
    }

    pub fn as_array(&self) -> [usize; 2] {
        [self.m1, self.m2]
    }

    /// All indices with `|m| ≤ n`, ordered by total order.
    pub fn up_to(n: usize) -> Vec<MultiIndex> {
        (0..=n).flat_map(|k| (0..=k).map(move |j| MultiIndex::new(k - j, j))).collect()
    }
}

impl From<[usize; 2]> for MultiIndex {
    fn from(m: [usize; 2]) -> Self {
        Self::new(m[0], m[1])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub moments: BTreeMap<MultiIndex, Complex64>,
    pub max_abs: f64,
}

impl MomentReport {
    fn from_map(moments: BTreeMap<MultiIndex, Complex64>) -> Self {
        let max_abs = moments.values().map(|v| v.norm()).fold(0.0, f64::max);
        Self { moments, max_abs }
    }

    pub fn get(&self, m: MultiIndex) -> Complex64 {
        self.moments.get(&m).copied().unwrap_or_default()
    }
}

fn check_order(order: usize) -> Result<()> {
    if order > DEFAULT_MAX_ORDER {
        return Err(ShearError::OrderTooHigh { order, max: DEFAULT_MAX_ORDER });
    }
    Ok(())
}

/// Index of `ξ = 0` on a dual axis and the usable stencil half-width.
fn zero_stencil(n: usize, up_to: usize) -> Result<(usize, usize)> {
    let c = n / 2;
    let half = STENCIL_HALF.min(c).min(n - 1 - c);
    if 2 * half < up_to {
        return Err(ShearError::GridTooCoarse(format!("{n} samples cannot resolve moments of order {up_to}")));
    }
    Ok((c, half))
}

/// `∂^m F(0)` for all `|m| ≤ up_to` from samples of a spectrum.
pub fn spectrum_derivatives_at_zero(spec: &FrequencyField2D, up_to: usize) -> Result<BTreeMap<MultiIndex, Complex64>> {
    let g = spec.grid;
    let (c1, h1) = zero_stencil(g.n1, up_to)?;
    let (c2, h2) = zero_stencil(g.n2, up_to)?;
    let nodes1: Vec<f64> = (0..=2 * h1).map(|j| (j as f64 - h1 as f64) * g.spacing[0]).collect();
    let nodes2: Vec<f64> = (0..=2 * h2).map(|j| (j as f64 - h2 as f64) * g.spacing[1]).collect();
    let w1 = fornberg_weights(0.0, &nodes1, up_to.min(2 * h1));
    let w2 = fornberg_weights(0.0, &nodes2, up_to.min(2 * h2));
    let mut out = BTreeMap::new();
    for m in MultiIndex::up_to(up_to) {
        let mut acc = ComplexSum::new();
        for (j2, &b) in w2[m.m2].iter().enumerate() {
            for (j1, &a) in w1[m.m1].iter().enumerate() {
                let v = spec.values[(c1 + j1 - h1) + g.n1 * (c2 + j2 - h2)];
                acc.add(v * (a * b));
            }
        }
        out.insert(m, acc.value());
    }
    Ok(out)
}

/// Moments `μ_m(f) = ∫ x^m f(x) dx` for `|m| ≤ up_to`.
pub fn moments(f: &SampledField2D, up_to: usize) -> Result<MomentReport> {
    check_order(up_to)?;
    let spec = fft_forward(f)?;
    let d = spectrum_derivatives_at_zero(&spec, up_to)?;
    let map = d
        .into_iter()
        .map(|(m, v)| (m, v / Complex64::new(0.0, -2.0 * PI).powu(m.order() as u32)))
        .collect();
    Ok(MomentReport::from_map(map))
}

/// Spacing-weighted sums `h1 h2 Σ x^m f(x)` (diagnostic only).
pub fn moments_spatial(f: &SampledField2D, up_to: usize) -> Result<MomentReport> {
    check_order(up_to)?;
    let g = f.grid;
    let mut map = BTreeMap::new();
    for m in MultiIndex::up_to(up_to) {
        let mut acc = ComplexSum::new();
        for (i, v) in f.values.iter().enumerate() {
            let x = g.point(i);
            acc.add(v * (x[0].powi(m.m1 as i32) * x[1].powi(m.m2 as i32)));
        }
        map.insert(m, acc.value() * g.cell_area());
    }
    Ok(MomentReport::from_map(map))
}

/// Line moments `∫ x_j^m f dx_j`, maximised over the transverse variable,
/// for `m = 0..=up_to`. `axis` is 1 or 2.
pub fn directional_moments(f: &SampledField2D, axis: usize, up_to: usize) -> Result<Vec<f64>> {
    check_order(up_to)?;
    if axis != 1 && axis != 2 {
        return Err(ShearError::InvalidArgument(format!("axis must be 1 or 2, got {axis}")));
    }
    let g = f.grid;
    let (n, nt, h, x0) = if axis == 1 {
        (g.n1, g.n2, g.spacing[0], g.origin[0])
    } else {
        (g.n2, g.n1, g.spacing[1], g.origin[1])
    };
    let (_, half) = zero_stencil(n, up_to)?;
    let d = 1.0 / (n as f64 * h);
    let nodes: Vec<f64> = (0..=2 * half).map(|j| (j as f64 - half as f64) * d).collect();
    let w = fornberg_weights(0.0, &nodes, up_to);
    let line = |t: usize, k: usize| if axis == 1 { f.at(k, t) } else { f.at(t, k) };
    let per_line: Vec<Vec<f64>> = (0..nt)
        .into_par_iter()
        .map(|t| {
            // 1D spectrum at the stencil frequencies
            let spec: Vec<Complex64> = nodes
                .iter()
                .map(|&xi| {
                    let mut acc = ComplexSum::new();
                    for k in 0..n {
                        let x = x0 + k as f64 * h;
                        let ph = -2.0 * PI * xi * x;
                        acc.add(line(t, k) * Complex64::new(ph.cos(), ph.sin()));
                    }
                    acc.value() * h
                })
                .collect();
            (0..=up_to)
                .map(|m| {
                    let dm: Complex64 = spec.iter().zip(&w[m]).map(|(v, c)| v * c).sum();
                    (dm / Complex64::new(0.0, -2.0 * PI).powu(m as u32)).norm()
                })
                .collect()
        })
        .collect();
    Ok((0..=up_to).map(|m| per_line.iter().map(|l| l[m]).fold(0.0, f64::max)).collect())
}

/// `ρ_ν(f) = sup_{x, |m| ≤ ν} ⟨x⟩^ν |∂^m f(x)|`, derivatives spectral.
pub fn schwartz_seminorm(f: &SampledField2D, nu: usize) -> Result<f64> {
    check_order(nu)?;
    let g = f.grid;
    let weights: Vec<f64> = (0..g.len())
        .map(|i| {
            let x = g.point(i);
            (1.0 + x[0] * x[0] + x[1] * x[1]).sqrt().powi(nu as i32)
        })
        .collect();
    let sups: Vec<f64> = MultiIndex::up_to(nu)
        .into_par_iter()
        .map(|m| {
            let d = spectral_derivative(f, m.as_array());
            d.values.iter().zip(&weights).map(|(v, w)| v.norm() * w).fold(0.0, f64::max)
        })
        .collect();
    Ok(sups.into_iter().fold(0.0, f64::max))
}

/// A resampled field plus a flag raised when the warp pulls in source
/// points outside the sampling window where the field is not negligible.
#[derive(Debug, Clone)]
pub struct Warped {
    pub field: SampledField2D,
    pub support_escape: bool,
}

fn resample(f: &SampledField2D, scale: f64, map1: impl Fn(f64) -> f64, map2: impl Fn(f64) -> f64) -> Warped {
    let g = f.grid;
    let it = TrigInterpolant::new(f);
    let s1: Vec<f64> = (0..g.n1).map(|i| map1(g.x1(i))).collect();
    let s2: Vec<f64> = (0..g.n2).map(|i| map2(g.x2(i))).collect();
    let values: Vec<Complex64> = it.eval_tensor(&s1, &s2).into_iter().map(|v| v * scale).collect();
    let (lo, hi) = (g.origin, [g.origin[0] + (g.n1 - 1) as f64 * g.spacing[0], g.origin[1] + (g.n2 - 1) as f64 * g.spacing[1]]);
    let thresh = 1e-8 * f.sup() * scale.abs();
    let mut escape = false;
    for (i2, y) in s2.iter().enumerate() {
        for (i1, x) in s1.iter().enumerate() {
            let outside = *x < lo[0] || *x > hi[0] || *y < lo[1] || *y > hi[1];
            if outside && values[i1 + g.n1 * i2].norm() > thresh {
                escape = true;
            }
        }
    }
    Warped { field: SampledField2D { grid: g, values }, support_escape: escape }
}

/// `T_b f(x) = f(x − b)`.
pub fn translate(f: &SampledField2D, b: [f64; 2]) -> Result<Warped> {
    if !(b[0].is_finite() && b[1].is_finite()) {
        return Err(ShearError::NonFinite);
    }
    Ok(resample(f, 1.0, |x| x - b[0], |y| y - b[1]))
}

/// `D_a f(x) = |a|^{-1} f(x/a)`: the unitary 1D dilation applied on both axes.
pub fn dilate(f: &SampledField2D, a: f64) -> Result<Warped> {
    if a == 0.0 || !a.is_finite() {
        return Err(ShearError::ZeroDilation);
    }
    Ok(resample(f, 1.0 / a.abs(), |x| x / a, |y| y / a))
}

/// `x_axis · f(x)`, `axis ∈ {1, 2}`.
pub fn multiply_by_coordinate(f: &SampledField2D, axis: usize) -> Result<SampledField2D> {
    if axis != 1 && axis != 2 {
        return Err(ShearError::InvalidArgument(format!("axis must be 1 or 2, got {axis}")));
    }
    let g = f.grid;
    let values = f.values.iter().enumerate().map(|(i, v)| v * g.point(i)[axis - 1]).collect();
    SampledField2D::new(g, values)
}

/// Output of the spectral-division antiderivative.
#[derive(Debug, Clone)]
pub struct Antiderivative {
    pub g: SampledField2D,
    /// Measured `ρ_{ν1}(g) / ρ_{ν2}(f)` for `(ν1, ν2) = (1, 6)`.
    pub seminorm_ratio: f64,
    /// Spectrum bins zeroed by the removable-singularity guard.
    pub guarded_bins: usize,
}

/// Relative magnitude above which a spectrum on the guard set counts as nonzero.
pub const GUARD_TOL: f64 = 1e-10;

/// `g` with `ĝ(ξ) = f̂(ξ) / ((2πiξ1)^{m1} (2πiξ2)^{m2})`, so `∂^m g = f`.
pub fn antiderivative_oracle(f: &SampledField2D, m: MultiIndex) -> Result<Antiderivative> {
    antiderivative_with(f, m, GUARD_TOL, true)
}

/// [`antiderivative_oracle`] with an explicit guard tolerance; the seminorm
/// ratio is skipped when `measure` is false.
pub fn antiderivative_with(f: &SampledField2D, m: MultiIndex, guard_tol: f64, measure: bool) -> Result<Antiderivative> {
    check_order(m.order() + 2)?;
    if m.order() == 0 {
        return Ok(Antiderivative { g: f.clone(), seminorm_ratio: 1.0, guarded_bins: 0 });
    }
    let report = moments(f, m.order() + 2)?;
    let scale = f.norm_l2().max(f64::MIN_POSITIVE);
    if report.max_abs > 1e-6 * scale.max(1.0) {
        return Err(ShearError::NotLizorkin { max_abs: report.max_abs });
    }
    let mut spec = fft_forward(f)?;
    let grid = spec.grid;
    let sup = spec.sup();
    let guard = [0.5 * grid.spacing[0], 0.5 * grid.spacing[1]];
    let mut guarded = 0;
    let mut worst = 0.0f64;
    for (i, v) in spec.values.iter_mut().enumerate() {
        let xi = grid.point(i);
        let on_guard = (m.m1 > 0 && xi[0].abs() < guard[0]) || (m.m2 > 0 && xi[1].abs() < guard[1]);
        if on_guard {
            worst = worst.max(v.norm());
            *v = Complex64::new(0.0, 0.0);
            guarded += 1;
        } else {
            let sym = Complex64::new(0.0, 2.0 * PI * xi[0]).powu(m.m1 as u32)
                * Complex64::new(0.0, 2.0 * PI * xi[1]).powu(m.m2 as u32);
            *v /= sym;
        }
    }
    if worst > guard_tol * sup {
        return Err(ShearError::SingularDivision { magnitude: worst / sup });
    }
    let g = fft_inverse(&spec)?;
    let seminorm_ratio = if measure {
        let den = schwartz_seminorm(f, 6)?;
        if den > 0.0 {
            schwartz_seminorm(&g, 1)? / den
        } else {
            0.0
        }
    } else {
        f64::NAN
    };
    Ok(Antiderivative { g, seminorm_ratio, guarded_bins: guarded })
}

/// `∫_{-∞}^{x_1} … ∫_{-∞}^{x_2} f`, `m1` times along axis 1 and `m2`
/// times along axis 2, by 8-point cumulative quadrature from the lower
/// grid edge.
pub fn cumulative_antiderivative(f: &SampledField2D, m: MultiIndex) -> SampledField2D {
    let g = f.grid;
    let mut v = f.values.clone();
    for _ in 0..m.m1 {
        v = (0..g.n2)
            .into_par_iter()
            .flat_map_iter(|i2| crate::oracle::cumulative_integral(&v[i2 * g.n1..(i2 + 1) * g.n1], g.spacing[0]))
            .collect();
    }
    for _ in 0..m.m2 {
        let cols: Vec<Vec<Complex64>> = (0..g.n1)
            .into_par_iter()
            .map(|i1| {
                let col: Vec<Complex64> = (0..g.n2).map(|i2| v[i1 + g.n1 * i2]).collect();
                crate::oracle::cumulative_integral(&col, g.spacing[1])
            })
            .collect();
        for (i1, col) in cols.iter().enumerate() {
            for (i2, c) in col.iter().enumerate() {
                v[i1 + g.n1 * i2] = *c;
            }
        }
    }
    SampledField2D { grid: g, values: v }
}

/// Test fields with closed-form spectra.
pub mod fields {
    use super::*;
    use crate::field::spectral_field;

    pub fn gaussian(grid: Grid2D, center: [f64; 2], width: f64) -> SampledField2D {
        SampledField2D::from_fn(grid, |x| {
            let r2 = (x[0] - center[0]).powi(2) + (x[1] - center[1]).powi(2);
            Complex64::new((-PI * r2 / (width * width)).exp(), 0.0)
        })
    }

    fn bump(eta: [f64; 2], sigma: f64) -> f64 {
        (-PI * sigma * sigma * (eta[0] * eta[0] + eta[1] * eta[1])).exp()
    }

    /// Spectrum `(ξ1/c1)^k [G(ξ − c) + G(ξ + c)] e^{-2πiξ·x0}` with
    /// `G(η) = e^{-πσ²|η|²}`: a Lizorkin packet (the factor `ξ1^k`
    /// makes `k` moments vanish exactly and the rest negligible).
    pub fn wave_packet_spectrum(xi: [f64; 2], center: [f64; 2], sigma: f64, k: u32, x0: [f64; 2]) -> Complex64 {
        let g = bump([xi[0] - center[0], xi[1] - center[1]], sigma) + bump([xi[0] + center[0], xi[1] + center[1]], sigma);
        let ph = -2.0 * PI * (xi[0] * x0[0] + xi[1] * x0[1]);
        Complex64::new(ph.cos(), ph.sin()) * (g * (xi[0] / center[0]).powi(k as i32))
    }

    pub fn wave_packet(grid: Grid2D, center: [f64; 2], sigma: f64, k: u32, x0: [f64; 2]) -> SampledField2D {
        spectral_field(grid, |xi| wave_packet_spectrum(xi, center, sigma, k, x0))
    }

    /// Spectrum `(ξ1 ξ2 / (c1 c2))^k [G(ξ − c) + G(ξ + c)]`, small near both axes.
    pub fn corner_packet_spectrum(xi: [f64; 2], center: [f64; 2], sigma: f64, k: u32) -> Complex64 {
        let g = bump([xi[0] - center[0], xi[1] - center[1]], sigma) + bump([xi[0] + center[0], xi[1] + center[1]], sigma);
        Complex64::new(g * (xi[0] * xi[1] / (center[0] * center[1])).powi(k as i32), 0.0)
    }

    pub fn corner_packet(grid: Grid2D, center: [f64; 2], sigma: f64, k: u32) -> SampledField2D {
        spectral_field(grid, |xi| corner_packet_spectrum(xi, center, sigma, k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_moments() {
        let g = Grid2D::centered(64, 4.0).unwrap();
        let f = fields::gaussian(g, [0.0, 0.0], 1.0);
        let r = moments(&f, 4).unwrap();
        assert!((r.get(MultiIndex::new(0, 0)) - 1.0).norm() < 1e-8);
        assert!(r.get(MultiIndex::new(1, 0)).norm() < 1e-12);
        // ∫ x1² e^{-π|x|²} = 1/(2π)
        assert!((r.get(MultiIndex::new(2, 0)).re - 1.0 / (2.0 * PI)).abs() < 1e-7);
    }

    #[test]
    fn zero_field_has_zero_moments() {
        let g = Grid2D::centered(32, 4.0).unwrap();
        let r = moments(&SampledField2D::zeros(g), 6).unwrap();
        assert_eq!(r.max_abs, 0.0);
        assert_eq!(directional_moments(&SampledField2D::zeros(g), 2, 3).unwrap(), vec![0.0; 4]);
    }

    #[test]
    fn order_cap() {
        let g = Grid2D::centered(32, 4.0).unwrap();
        assert!(matches!(moments(&SampledField2D::zeros(g), 11), Err(ShearError::OrderTooHigh { .. })));
    }

    #[test]
    fn gaussian_seminorm_zero() {
        let g = Grid2D::centered(64, 4.0).unwrap();
        let f = fields::gaussian(g, [0.0, 0.0], 1.0);
        assert!((schwartz_seminorm(&f, 0).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn cumulative_matches_spectral_division_for_packet() {
        let g = Grid2D::centered(256, 6.4).unwrap();
        let f = fields::corner_packet(g, [1.0, 1.0], 4.0, 7);
        let m = MultiIndex::new(1, 0);
        let a = antiderivative_with(&f, m, GUARD_TOL, false).unwrap();
        let b = cumulative_antiderivative(&f, m);
        assert!(b.rel_l2_error(&a.g).unwrap() < 1e-6);
    }
}
