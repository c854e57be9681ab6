//! Uniform grids, sampled fields in space and frequency, and the
//! spacing-weighted FFT pair.
//!
//! A sampled field stands for the periodic trigonometric polynomial that
//! interpolates its samples. The forward transform approximates
//! `F f(ξ) = ∫ f(x) e^{-2πiξx} dx` by `h1 h2 Σ f_j e^{-2πiξ x_j}` on the dual
//! grid `ξ_k = ξ0 + kΔ`, `Δ = 1/(n h)`, whose origin `-floor(n/2)Δ` puts
//! `ξ = 0` on a node.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Result, ShearError};
use crate::quadrature::KahanSum;

/// A uniform tensor grid on ℝ². Samples are stored with axis 1 fastest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    pub n1: usize,
    pub n2: usize,
    pub origin: [f64; 2],
    pub spacing: [f64; 2],
}

impl Grid2D {
    pub fn new(n1: usize, n2: usize, origin: [f64; 2], spacing: [f64; 2]) -> Result<Self> {
        if n1 < 8 || n2 < 8 {
            return Err(ShearError::InvalidGrid(format!("need at least 8 samples per axis, got {n1}x{n2}")));
        }
        if !(spacing[0] > 0.0 && spacing[1] > 0.0 && spacing[0].is_finite() && spacing[1].is_finite()) {
            return Err(ShearError::InvalidGrid("spacing must be positive and finite".into()));
        }
        if !(origin[0].is_finite() && origin[1].is_finite()) {
            return Err(ShearError::InvalidGrid("origin must be finite".into()));
        }
        Ok(Self { n1, n2, origin, spacing })
    }

    /// Square grid of `n` samples per axis covering `[-L, L)`, with `x = 0`
    /// on a node.
    pub fn centered(n: usize, half_width: f64) -> Result<Self> {
        Self::centered_rect(n, n, [half_width, half_width])
    }

    pub fn centered_rect(n1: usize, n2: usize, half_width: [f64; 2]) -> Result<Self> {
        let h1 = 2.0 * half_width[0] / n1 as f64;
        let h2 = 2.0 * half_width[1] / n2 as f64;
        Self::new(n1, n2, [-((n1 / 2) as f64) * h1, -((n2 / 2) as f64) * h2], [h1, h2])
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x1(&self, i: usize) -> f64 {
        self.origin[0] + i as f64 * self.spacing[0]
    }

    pub fn x2(&self, i: usize) -> f64 {
        self.origin[1] + i as f64 * self.spacing[1]
    }

    pub fn point(&self, idx: usize) -> [f64; 2] {
        [self.x1(idx % self.n1), self.x2(idx / self.n1)]
    }

    pub fn cell_area(&self) -> f64 {
        self.spacing[0] * self.spacing[1]
    }

    /// Period of the grid along each axis.
    pub fn period(&self) -> [f64; 2] {
        [self.n1 as f64 * self.spacing[0], self.n2 as f64 * self.spacing[1]]
    }

    /// The frequency grid dual to this one.
    pub fn dual(&self) -> Grid2D {
        let d1 = 1.0 / (self.n1 as f64 * self.spacing[0]);
        let d2 = 1.0 / (self.n2 as f64 * self.spacing[1]);
        Grid2D {
            n1: self.n1,
            n2: self.n2,
            origin: [-((self.n1 / 2) as f64) * d1, -((self.n2 / 2) as f64) * d2],
            spacing: [d1, d2],
        }
    }

    /// Nyquist frequency per axis.
    pub fn nyquist(&self) -> [f64; 2] {
        [0.5 / self.spacing[0], 0.5 / self.spacing[1]]
    }

    /// True if the grids agree to rounding.
    pub fn same_as(&self, other: &Grid2D) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()));
        self.n1 == other.n1
            && self.n2 == other.n2
            && close(self.origin[0], other.origin[0])
            && close(self.origin[1], other.origin[1])
            && close(self.spacing[0], other.spacing[0])
            && close(self.spacing[1], other.spacing[1])
    }

    pub fn check_same(&self, other: &Grid2D) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(ShearError::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}

fn check_values(grid: &Grid2D, values: &[Complex64]) -> Result<()> {
    if values.len() != grid.len() {
        return Err(ShearError::GridMismatch(format!(
            "{} values for a {}x{} grid",
            values.len(),
            grid.n1,
            grid.n2
        )));
    }
    if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(ShearError::InvalidArgument("field contains NaN or Inf".into()));
    }
    Ok(())
}

/// Complex samples of a function on ℝ².
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField2D {
    pub grid: Grid2D,
    pub values: Vec<Complex64>,
}

impl SampledField2D {
    pub fn new(grid: Grid2D, values: Vec<Complex64>) -> Result<Self> {
        check_values(&grid, &values)?;
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid2D) -> Self {
        Self { grid, values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_fn(grid: Grid2D, f: impl Fn([f64; 2]) -> Complex64 + Sync) -> Self {
        let values = (0..grid.len()).into_par_iter().map(|i| f(grid.point(i))).collect();
        Self { grid, values }
    }

    pub fn at(&self, i1: usize, i2: usize) -> Complex64 {
        self.values[i1 + self.grid.n1 * i2]
    }

    /// `sqrt(h1 h2 Σ |f|²)`.
    pub fn norm_l2(&self) -> f64 {
        let mut acc = KahanSum::new();
        for v in &self.values {
            acc.add(v.norm_sqr());
        }
        (acc.value() * self.grid.cell_area()).sqrt()
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Sesquilinear `⟨f, g⟩ = ∫ f conj(g)`.
    pub fn inner(&self, other: &SampledField2D) -> Result<Complex64> {
        self.grid.check_same(&other.grid)?;
        let s = crate::quadrature::sum_complex(self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()));
        Ok(s * self.grid.cell_area())
    }

    /// Bilinear `∫ f g`.
    pub fn bilinear(&self, other: &SampledField2D) -> Result<Complex64> {
        self.grid.check_same(&other.grid)?;
        let s = crate::quadrature::sum_complex(self.values.iter().zip(&other.values).map(|(a, b)| a * b));
        Ok(s * self.grid.cell_area())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn conj(&self) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|v| v.conj()).collect() }
    }

    pub fn add(&self, other: &SampledField2D) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(Self { grid: self.grid, values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, other: &SampledField2D) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(Self { grid: self.grid, values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect() })
    }

    /// Relative L² distance `‖self − reference‖ / ‖reference‖`.
    pub fn rel_l2_error(&self, reference: &SampledField2D) -> Result<f64> {
        let d = self.sub(reference)?.norm_l2();
        let r = reference.norm_l2();
        Ok(if r == 0.0 { d } else { d / r })
    }

    /// Largest magnitude on the outermost ring of samples.
    pub fn boundary_max(&self) -> f64 {
        let (n1, n2) = (self.grid.n1, self.grid.n2);
        let mut m = 0.0f64;
        for i1 in 0..n1 {
            m = m.max(self.at(i1, 0).norm()).max(self.at(i1, n2 - 1).norm());
        }
        for i2 in 0..n2 {
            m = m.max(self.at(0, i2).norm()).max(self.at(n1 - 1, i2).norm());
        }
        m
    }
}

/// Samples of a spectrum on a frequency grid. `space_origin` remembers
/// where the dual spatial grid starts so the inverse transform is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyField2D {
    pub grid: Grid2D,
    pub space_origin: [f64; 2],
    pub values: Vec<Complex64>,
}

impl FrequencyField2D {
    pub fn new(grid: Grid2D, space_origin: [f64; 2], values: Vec<Complex64>) -> Result<Self> {
        check_values(&grid, &values)?;
        Ok(Self { grid, space_origin, values })
    }

    /// The spatial grid this spectrum belongs to.
    pub fn space_grid(&self) -> Grid2D {
        let h1 = 1.0 / (self.grid.n1 as f64 * self.grid.spacing[0]);
        let h2 = 1.0 / (self.grid.n2 as f64 * self.grid.spacing[1]);
        Grid2D { n1: self.grid.n1, n2: self.grid.n2, origin: self.space_origin, spacing: [h1, h2] }
    }

    pub fn norm_l2(&self) -> f64 {
        let mut acc = KahanSum::new();
        for v in &self.values {
            acc.add(v.norm_sqr());
        }
        (acc.value() * self.grid.cell_area()).sqrt()
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Precomputed FFT plans and twiddles for one spatial grid.
///
/// Forward (per axis): multiply by `α_j = e^{-2πiξ0 j h}`, DFT, multiply by
/// `β_k = h e^{-2πiξ_k x0}`. Inverse undoes each step.
#[derive(Clone)]
pub struct SpectralFrame {
    pub grid: Grid2D,
    pub freq: Grid2D,
    fwd: [Arc<dyn Fft<f64>>; 2],
    inv: [Arc<dyn Fft<f64>>; 2],
    alpha: [Vec<Complex64>; 2],
    beta: [Vec<Complex64>; 2],
}

impl std::fmt::Debug for SpectralFrame {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralFrame").field("grid", &self.grid).finish()
    }
}

fn cis(t: f64) -> Complex64 {
    Complex64::new(t.cos(), t.sin())
}

impl SpectralFrame {
    pub fn new(grid: Grid2D) -> Self {
        let freq = grid.dual();
        let mut planner = FftPlanner::new();
        let fwd = [planner.plan_fft_forward(grid.n1), planner.plan_fft_forward(grid.n2)];
        let inv = [planner.plan_fft_inverse(grid.n1), planner.plan_fft_inverse(grid.n2)];
        let axis = |ax: usize| {
            let n = [grid.n1, grid.n2][ax];
            let h = grid.spacing[ax];
            let x0 = grid.origin[ax];
            let xi0 = freq.origin[ax];
            let d = freq.spacing[ax];
            let alpha: Vec<Complex64> = (0..n).map(|j| cis(-2.0 * PI * xi0 * j as f64 * h)).collect();
            let beta: Vec<Complex64> = (0..n).map(|k| cis(-2.0 * PI * (xi0 + k as f64 * d) * x0) * h).collect();
            (alpha, beta)
        };
        let (a1, b1) = axis(0);
        let (a2, b2) = axis(1);
        Self { grid, freq, fwd, inv, alpha: [a1, a2], beta: [b1, b2] }
    }

    /// Frequency of bin `(k1, k2)`.
    pub fn xi(&self, k1: usize, k2: usize) -> [f64; 2] {
        [self.freq.x1(k1), self.freq.x2(k2)]
    }

    fn transform_axes(&self, data: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>; 2]) {
        let (n1, n2) = (self.grid.n1, self.grid.n2);
        plans[0].process(data);
        let mut t = vec![Complex64::new(0.0, 0.0); n1 * n2];
        for i2 in 0..n2 {
            for i1 in 0..n1 {
                t[i2 + n2 * i1] = data[i1 + n1 * i2];
            }
        }
        plans[1].process(&mut t);
        for i1 in 0..n1 {
            for i2 in 0..n2 {
                data[i1 + n1 * i2] = t[i2 + n2 * i1];
            }
        }
    }

    /// Space samples to spectrum samples, in place.
    pub fn forward_in_place(&self, data: &mut [Complex64]) {
        let n1 = self.grid.n1;
        for (i, v) in data.iter_mut().enumerate() {
            *v *= self.alpha[0][i % n1] * self.alpha[1][i / n1];
        }
        self.transform_axes(data, &self.fwd);
        for (i, v) in data.iter_mut().enumerate() {
            *v *= self.beta[0][i % n1] * self.beta[1][i / n1];
        }
    }

    /// Spectrum samples to space samples, in place.
    pub fn inverse_in_place(&self, data: &mut [Complex64]) {
        let (n1, n2) = (self.grid.n1, self.grid.n2);
        for (i, v) in data.iter_mut().enumerate() {
            *v /= self.beta[0][i % n1] * self.beta[1][i / n1];
        }
        self.transform_axes(data, &self.inv);
        let norm = (n1 * n2) as f64;
        for (i, v) in data.iter_mut().enumerate() {
            *v /= self.alpha[0][i % n1] * self.alpha[1][i / n1] * norm;
        }
    }

    pub fn forward(&self, f: &SampledField2D) -> Result<FrequencyField2D> {
        self.grid.check_same(&f.grid)?;
        let mut v = f.values.clone();
        self.forward_in_place(&mut v);
        Ok(FrequencyField2D { grid: self.freq, space_origin: self.grid.origin, values: v })
    }

    pub fn inverse(&self, spec: &FrequencyField2D) -> Result<SampledField2D> {
        self.freq.check_same(&spec.grid)?;
        let mut v = spec.values.clone();
        self.inverse_in_place(&mut v);
        Ok(SampledField2D { grid: self.grid, values: v })
    }
}

/// Spacing-weighted forward transform.
pub fn fft_forward(f: &SampledField2D) -> Result<FrequencyField2D> {
    SpectralFrame::new(f.grid).forward(f)
}

/// Inverse of [`fft_forward`].
pub fn fft_inverse(spec: &FrequencyField2D) -> Result<SampledField2D> {
    let frame = SpectralFrame::new(spec.space_grid());
    frame.inverse(spec)
}

/// Per-axis phase factors of the trigonometric interpolant at local
/// coordinate `t = x − x0`; the Nyquist bin of an even axis becomes a cosine.
fn interp_phases(n: usize, xi0: f64, d: f64, t: f64, out: &mut [Complex64]) {
    let step = cis(2.0 * PI * d * t);
    let mut p = cis(2.0 * PI * xi0 * t);
    for o in out.iter_mut().take(n) {
        *o = p;
        p *= step;
    }
    if n % 2 == 0 {
        out[0] = Complex64::new((2.0 * PI * xi0 * t).cos(), 0.0);
    }
}

/// Trigonometric interpolant of a sampled field, evaluable anywhere.
#[derive(Debug, Clone)]
pub struct TrigInterpolant {
    pub grid: Grid2D,
    freq: Grid2D,
    coef: Vec<Complex64>,
}

impl TrigInterpolant {
    pub fn new(f: &SampledField2D) -> Self {
        let frame = SpectralFrame::new(f.grid);
        let mut c = f.values.clone();
        frame.forward_in_place(&mut c);
        // Δ1Δ2 F_k e^{2πiξ_k x0} = F_k / (n1 n2 β_k)
        let (n1, n2) = (f.grid.n1, f.grid.n2);
        let norm = (n1 * n2) as f64;
        for (i, v) in c.iter_mut().enumerate() {
            *v /= frame.beta[0][i % n1] * frame.beta[1][i / n1] * norm;
        }
        Self { grid: f.grid, freq: frame.freq, coef: c }
    }

    /// Value of the interpolant at `x`.
    pub fn eval(&self, x: [f64; 2]) -> Complex64 {
        self.eval_deriv(x, [0, 0])
    }

    /// Value of `∂^m` of the interpolant at `x`.
    pub fn eval_deriv(&self, x: [f64; 2], m: [usize; 2]) -> Complex64 {
        let (n1, n2) = (self.grid.n1, self.grid.n2);
        let mut p1 = vec![Complex64::new(0.0, 0.0); n1];
        let mut p2 = vec![Complex64::new(0.0, 0.0); n2];
        let t1 = x[0] - self.grid.origin[0];
        let t2 = x[1] - self.grid.origin[1];
        interp_phases(n1, self.freq.origin[0], self.freq.spacing[0], t1, &mut p1);
        interp_phases(n2, self.freq.origin[1], self.freq.spacing[1], t2, &mut p2);
        if m != [0, 0] {
            deriv_phases(n1, self.freq.origin[0], self.freq.spacing[0], t1, m[0], &mut p1);
            deriv_phases(n2, self.freq.origin[1], self.freq.spacing[1], t2, m[1], &mut p2);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for k2 in 0..n2 {
            let row = &self.coef[k2 * n1..(k2 + 1) * n1];
            let mut r = Complex64::new(0.0, 0.0);
            for (c, p) in row.iter().zip(&p1) {
                r += c * p;
            }
            acc += r * p2[k2];
        }
        acc
    }

    pub fn eval_many(&self, points: &[[f64; 2]]) -> Vec<Complex64> {
        points.par_iter().map(|&x| self.eval(x)).collect()
    }

    /// Values on the tensor grid `x1s × x2s` (`x1` fastest), by two
    /// separable contractions.
    pub fn eval_tensor(&self, x1s: &[f64], x2s: &[f64]) -> Vec<Complex64> {
        let (n1, n2) = (self.grid.n1, self.grid.n2);
        let phases = |n: usize, ax: usize, xs: &[f64]| -> Vec<Vec<Complex64>> {
            xs.par_iter()
                .map(|&x| {
                    let mut p = vec![Complex64::new(0.0, 0.0); n];
                    interp_phases(n, self.freq.origin[ax], self.freq.spacing[ax], x - self.grid.origin[ax], &mut p);
                    p
                })
                .collect()
        };
        let p1 = phases(n1, 0, x1s);
        let p2 = phases(n2, 1, x2s);
        // rows[k2][j1] = Σ_k1 c[k1,k2] p1[j1][k1]
        let rows: Vec<Vec<Complex64>> = (0..n2)
            .into_par_iter()
            .map(|k2| {
                let row = &self.coef[k2 * n1..(k2 + 1) * n1];
                p1.iter().map(|p| row.iter().zip(p).map(|(c, q)| c * q).sum()).collect()
            })
            .collect();
        let m1 = x1s.len();
        let out: Vec<Vec<Complex64>> = p2
            .par_iter()
            .map(|q| {
                let mut line = vec![Complex64::new(0.0, 0.0); m1];
                for (k2, qk) in q.iter().enumerate() {
                    for (o, r) in line.iter_mut().zip(&rows[k2]) {
                        *o += r * qk;
                    }
                }
                line
            })
            .collect();
        out.concat()
    }
}

/// The field whose spectrum samples on the dual grid are `fhat`.
pub fn spectral_field(grid: Grid2D, fhat: impl Fn([f64; 2]) -> Complex64 + Sync) -> SampledField2D {
    let frame = SpectralFrame::new(grid);
    let freq = grid.dual();
    let mut v: Vec<Complex64> = (0..freq.len()).into_par_iter().map(|i| fhat(freq.point(i))).collect();
    frame.inverse_in_place(&mut v);
    SampledField2D { grid, values: v }
}

fn deriv_phases(n: usize, xi0: f64, d: f64, t: f64, m: usize, out: &mut [Complex64]) {
    if m == 0 {
        return;
    }
    for (k, o) in out.iter_mut().enumerate().take(n) {
        let xi = xi0 + k as f64 * d;
        *o *= Complex64::new(0.0, 2.0 * PI * xi).powu(m as u32);
    }
    if n % 2 == 0 {
        // d^m/dt^m cos(wt) = w^m cos(wt + mπ/2), w = |2πξ0|
        let w = (2.0 * PI * xi0).abs();
        let v = w.powi(m as i32) * (w * t + m as f64 * 0.5 * PI).cos();
        out[0] = Complex64::new(v, 0.0);
    }
}

/// `∂^m f` by spectral differentiation. Odd orders drop the Nyquist bin.
pub fn spectral_derivative(f: &SampledField2D, m: [usize; 2]) -> SampledField2D {
    if m == [0, 0] {
        return f.clone();
    }
    let frame = SpectralFrame::new(f.grid);
    let mut v = f.values.clone();
    frame.forward_in_place(&mut v);
    multiply_derivative_symbol(&frame, &mut v, m);
    frame.inverse_in_place(&mut v);
    SampledField2D { grid: f.grid, values: v }
}

/// Multiply spectrum samples by `(2πiξ1)^m1 (2πiξ2)^m2`.
pub fn multiply_derivative_symbol(frame: &SpectralFrame, spec: &mut [Complex64], m: [usize; 2]) {
    let (n1, n2) = (frame.grid.n1, frame.grid.n2);
    let sym = |n: usize, ax: usize, k: usize, order: usize| -> Complex64 {
        if order == 0 {
            return Complex64::new(1.0, 0.0);
        }
        if n % 2 == 0 && k == 0 && order % 2 == 1 {
            return Complex64::new(0.0, 0.0);
        }
        let xi = frame.freq.origin[ax] + k as f64 * frame.freq.spacing[ax];
        Complex64::new(0.0, 2.0 * PI * xi).powu(order as u32)
    };
    let s1: Vec<Complex64> = (0..n1).map(|k| sym(n1, 0, k, m[0])).collect();
    let s2: Vec<Complex64> = (0..n2).map(|k| sym(n2, 1, k, m[1])).collect();
    for (i, v) in spec.iter_mut().enumerate() {
        *v *= s1[i % n1] * s2[i / n1];
    }
}

/// Fourier transform of the sampled measure `h1 h2 Σ f_j δ_{x_j}` at `η`,
/// restricted to the fundamental band (zero outside).
pub fn dtft(f: &SampledField2D, eta: [f64; 2]) -> Complex64 {
    let ny = f.grid.nyquist();
    if eta[0].abs() > ny[0] || eta[1].abs() > ny[1] {
        return Complex64::new(0.0, 0.0);
    }
    dtft_unrestricted(f, eta)
}

/// Fourier transform of the sampled measure without band restriction.
pub fn dtft_unrestricted(f: &SampledField2D, eta: [f64; 2]) -> Complex64 {
    let g = f.grid;
    let mut p1 = Vec::with_capacity(g.n1);
    let step = cis(-2.0 * PI * eta[0] * g.spacing[0]);
    let mut p = cis(-2.0 * PI * eta[0] * g.origin[0]);
    for _ in 0..g.n1 {
        p1.push(p);
        p *= step;
    }
    let step2 = cis(-2.0 * PI * eta[1] * g.spacing[1]);
    let mut q = cis(-2.0 * PI * eta[1] * g.origin[1]);
    let mut acc = Complex64::new(0.0, 0.0);
    for i2 in 0..g.n2 {
        let row = &f.values[i2 * g.n1..(i2 + 1) * g.n1];
        let mut r = Complex64::new(0.0, 0.0);
        for (v, p) in row.iter().zip(&p1) {
            r += v * p;
        }
        acc += r * q;
        q *= step2;
    }
    acc * g.cell_area()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(grid: Grid2D) -> SampledField2D {
        SampledField2D::from_fn(grid, |x| Complex64::new((-PI * (x[0] * x[0] + x[1] * x[1])).exp(), 0.0))
    }

    #[test]
    fn gaussian_is_self_dual() {
        let g = Grid2D::centered(64, 4.0).unwrap();
        let f = gaussian(g);
        let spec = fft_forward(&f).unwrap();
        let mut err = 0.0f64;
        for k in 0..spec.values.len() {
            let xi = spec.grid.point(k);
            let exact = (-PI * (xi[0] * xi[0] + xi[1] * xi[1])).exp();
            err = err.max((spec.values[k] - exact).norm());
        }
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn coarse_gaussian_sits_at_the_aliasing_floor() {
        let g = Grid2D::centered(64, 8.0).unwrap();
        let spec = fft_forward(&gaussian(g)).unwrap();
        let mut err = 0.0f64;
        for k in 0..spec.values.len() {
            let xi = spec.grid.point(k);
            err = err.max((spec.values[k] - (-PI * (xi[0] * xi[0] + xi[1] * xi[1])).exp()).norm());
        }
        let floor = (-4.0 * PI).exp();
        assert!(err < 1.01 * floor && err > 0.99 * floor, "{err}");
    }

    #[test]
    fn tensor_evaluation_matches_pointwise() {
        let g = Grid2D::centered(32, 4.0).unwrap();
        let f = gaussian(g);
        let it = TrigInterpolant::new(&f);
        let xs = [-0.3, 0.1, 1.7];
        let ys = [0.45, -2.0];
        let t = it.eval_tensor(&xs, &ys);
        for (j, &y) in ys.iter().enumerate() {
            for (i, &x) in xs.iter().enumerate() {
                assert!((t[i + 3 * j] - it.eval([x, y])).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn spectral_field_inverts_sampled_spectrum() {
        let g = Grid2D::centered(64, 4.0).unwrap();
        let f = spectral_field(g, |xi| Complex64::new((-PI * (xi[0] * xi[0] + xi[1] * xi[1])).exp(), 0.0));
        assert!(f.sub(&gaussian(g)).unwrap().sup() < 1e-12);
    }

    #[test]
    fn round_trip_and_parseval() {
        let g = Grid2D::new(24, 16, [-3.1, 2.0], [0.3, 0.45]).unwrap();
        let f = SampledField2D::from_fn(g, |x| Complex64::new((x[0] * 1.3).sin() + x[1], (x[0] * x[1]).cos()));
        let spec = fft_forward(&f).unwrap();
        let back = fft_inverse(&spec).unwrap();
        let err = back.sub(&f).unwrap().sup();
        assert!(err < 1e-12, "{err}");
        assert!((spec.norm_l2() - f.norm_l2()).abs() < 1e-12 * f.norm_l2());
    }

    #[test]
    fn interpolant_reproduces_nodes_and_band_limited_functions() {
        let g = Grid2D::centered(64, 4.0).unwrap();
        let f = SampledField2D::from_fn(g, |x| {
            Complex64::new((-PI * (x[0] * x[0] + x[1] * x[1]) / 1.5).exp(), 0.0) * cis(2.0 * x[0])
        });
        let it = TrigInterpolant::new(&f);
        for idx in [0, 17, 300, 1023] {
            assert!((it.eval(g.point(idx)) - f.values[idx]).norm() < 1e-12);
        }
        let x = [0.123, -0.456];
        let exact = Complex64::new((-PI * (x[0] * x[0] + x[1] * x[1]) / 1.5).exp(), 0.0) * cis(2.0 * x[0]);
        assert!((it.eval(x) - exact).norm() < 1e-10);
    }

    #[test]
    fn spectral_derivative_of_gaussian() {
        let g = Grid2D::centered(64, 4.0).unwrap();
        let f = gaussian(g);
        let d = spectral_derivative(&f, [1, 2]);
        let exact = SampledField2D::from_fn(g, |x| {
            let e = (-PI * (x[0] * x[0] + x[1] * x[1])).exp();
            Complex64::new(-2.0 * PI * x[0] * e * ((2.0 * PI * x[1]).powi(2) - 2.0 * PI), 0.0)
        });
        assert!(d.sub(&exact).unwrap().sup() < 1e-9);
        let it = TrigInterpolant::new(&f);
        let x = [0.31, -0.2];
        let e = (-PI * (x[0] * x[0] + x[1] * x[1])).exp();
        let ex = -2.0 * PI * x[0] * e * ((2.0 * PI * x[1]).powi(2) - 2.0 * PI);
        assert!((it.eval_deriv(x, [1, 2]).re - ex).abs() < 1e-9);
    }

    #[test]
    fn dtft_matches_fft_on_nodes() {
        let g = Grid2D::centered(16, 3.0).unwrap();
        let f = gaussian(g);
        let spec = fft_forward(&f).unwrap();
        for idx in [0, 5, 100, 255] {
            let xi = spec.grid.point(idx);
            assert!((dtft(&f, xi) - spec.values[idx]).norm() < 1e-13);
        }
    }
}
