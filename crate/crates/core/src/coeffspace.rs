//! Functions on the shearlet group sampled on a parameter grid: Haar
//! quadrature, the weighted seminorm family and polynomial growth bounds.

use std::borrow::Cow;
use std::f64::consts::LN_2;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, ShearError};
use crate::field::{spectral_derivative, Grid2D, SampledField2D};
use crate::group::GroupElement;
use crate::quadrature::{fornberg_weights, ComplexSum};

/// Sample points of `(b, s, a)` with per-`(s, a)` Haar weights.
///
/// `haar_weights[is + ns·ia]` is the weight of `ds da / |a|³` at that node:
/// trapezoid in `s` times trapezoid in `t = log2|a|` per sign branch, with
/// `da/|a|³ = ln 2 · |a|^{-2} dt`. The `db` cell area is applied separately.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamGrid {
    pub b_grid: Grid2D,
    pub s_values: Vec<f64>,
    pub a_values: Vec<f64>,
    pub haar_weights: Vec<f64>,
}

/// Resolution of a symmetric parameter grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSpec {
    /// Octaves on each side of `|a| = 1`.
    pub octaves: u32,
    pub per_octave: u32,
    pub s_max: f64,
    pub ds: f64,
}

impl Default for ParamSpec {
    fn default() -> Self {
        Self { octaves: 4, per_octave: 16, s_max: 3.0, ds: 1.0 / 16.0 }
    }
}

impl ParamSpec {
    /// Half the resolution in both `s` and `log2|a|`.
    pub fn coarsened(&self) -> Self {
        Self { per_octave: (self.per_octave / 2).max(1), ds: 2.0 * self.ds, ..*self }
    }
}

/// Trapezoid weights for sorted nodes; a single node gets weight 1.
fn trapezoid(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|i| {
            let l = if i > 0 { nodes[i] - nodes[i - 1] } else { 0.0 };
            let r = if i + 1 < n { nodes[i + 1] - nodes[i] } else { 0.0 };
            0.5 * (l + r)
        })
        .collect()
}

impl ParamGrid {
    /// Grid on explicit `s` and `a` values (`s` uniform, `a` sorted, nonzero).
    pub fn from_values(b_grid: Grid2D, s_values: Vec<f64>, a_values: Vec<f64>) -> Result<Self> {
        if s_values.is_empty() || a_values.is_empty() {
            return Err(ShearError::InvalidGrid("empty s or a axis".into()));
        }
        if s_values.iter().chain(&a_values).any(|v| !v.is_finite()) {
            return Err(ShearError::NonFinite);
        }
        if a_values.contains(&0.0) {
            return Err(ShearError::ZeroDilation);
        }
        if s_values.windows(2).any(|w| w[1] <= w[0]) || a_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ShearError::InvalidGrid("s and a values must be strictly increasing".into()));
        }
        if s_values.len() > 2 {
            let d0 = s_values[1] - s_values[0];
            if s_values.windows(2).any(|w| ((w[1] - w[0]) - d0).abs() > 1e-9 * d0) {
                return Err(ShearError::InvalidGrid("s spacing must be uniform".into()));
            }
        }
        let ws = trapezoid(&s_values);
        let mut wa = vec![0.0; a_values.len()];
        for neg in [true, false] {
            let idx: Vec<usize> = (0..a_values.len()).filter(|&i| (a_values[i] < 0.0) == neg).collect();
            if idx.is_empty() {
                continue;
            }
            let t: Vec<f64> = idx.iter().map(|&i| a_values[i].abs().log2()).collect();
            let mut order: Vec<usize> = (0..t.len()).collect();
            order.sort_by(|&x, &y| t[x].total_cmp(&t[y]));
            let ts: Vec<f64> = order.iter().map(|&k| t[k]).collect();
            let wt = trapezoid(&ts);
            for (k, &o) in order.iter().enumerate() {
                let a = a_values[idx[o]];
                wa[idx[o]] = wt[k] * LN_2 / (a * a);
            }
        }
        let ns = s_values.len();
        let mut haar_weights = vec![0.0; ns * a_values.len()];
        for (ia, w_a) in wa.iter().enumerate() {
            for (is, w_s) in ws.iter().enumerate() {
                haar_weights[is + ns * ia] = w_s * w_a;
            }
        }
        Ok(Self { b_grid, s_values, a_values, haar_weights })
    }

    /// Symmetric grid: `s ∈ [−S, S]` step `Δs`, `|a| = 2^t` for
    /// `t ∈ [−J, J]` with `per_octave` steps per unit, both signs.
    pub fn new(b_grid: Grid2D, spec: ParamSpec) -> Result<Self> {
        if spec.octaves == 0 || spec.per_octave == 0 || !(spec.ds > 0.0) || !(spec.s_max >= 0.0) {
            return Err(ShearError::InvalidGrid(format!("bad parameter spec {spec:?}")));
        }
        let ks = (spec.s_max / spec.ds).round() as i64;
        let s_values: Vec<f64> = (-ks..=ks).map(|k| k as f64 * spec.ds).collect();
        let kt = (spec.octaves * spec.per_octave) as i64;
        let pos: Vec<f64> = (-kt..=kt).map(|k| (k as f64 / spec.per_octave as f64).exp2()).collect();
        let mut a_values: Vec<f64> = pos.iter().rev().map(|a| -a).collect();
        a_values.extend(pos);
        Self::from_values(b_grid, s_values, a_values)
    }

    /// The default grid: 4 octaves, 16 per octave, `|s| ≤ 3`, `Δs = 1/16`.
    pub fn default_for(b_grid: Grid2D) -> Self {
        Self::new(b_grid, ParamSpec::default()).expect("default spec is valid")
    }

    pub fn ns(&self) -> usize {
        self.s_values.len()
    }

    pub fn na(&self) -> usize {
        self.a_values.len()
    }

    pub fn slices(&self) -> usize {
        self.ns() * self.na()
    }

    pub fn weight(&self, is: usize, ia: usize) -> f64 {
        self.haar_weights[is + self.ns() * ia]
    }

    /// Total number of samples.
    pub fn len(&self) -> usize {
        self.b_grid.len() * self.slices()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn element(&self, i: usize, is: usize, ia: usize) -> GroupElement {
        GroupElement { b: self.b_grid.point(i), s: self.s_values[is], a: self.a_values[ia] }
    }
}

/// Complex samples on a [`ParamGrid`], `b1` fastest, then `b2`, `s`, `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVolume {
    pub pgrid: ParamGrid,
    pub values: Vec<Complex64>,
}

impl CoefficientVolume {
    pub fn new(pgrid: ParamGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != pgrid.len() {
            return Err(ShearError::GridMismatch(format!("{} values for {} parameter nodes", values.len(), pgrid.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(ShearError::NonFinite);
        }
        Ok(Self { pgrid, values })
    }

    pub fn zeros(pgrid: ParamGrid) -> Self {
        let n = pgrid.len();
        Self { pgrid, values: vec![Complex64::new(0.0, 0.0); n] }
    }

    /// Volume with values `f(g)`.
    pub fn from_fn(pgrid: ParamGrid, f: impl Fn(&GroupElement) -> Complex64 + Sync) -> Self {
        let nb = pgrid.b_grid.len();
        let ns = pgrid.ns();
        let values = (0..pgrid.len())
            .into_par_iter()
            .map(|k| {
                let (i, rest) = (k % nb, k / nb);
                f(&pgrid.element(i, rest % ns, rest / ns))
            })
            .collect();
        Self { pgrid, values }
    }

    pub fn slice(&self, is: usize, ia: usize) -> &[Complex64] {
        let nb = self.pgrid.b_grid.len();
        let k = (is + self.pgrid.ns() * ia) * nb;
        &self.values[k..k + nb]
    }

    pub fn slice_field(&self, is: usize, ia: usize) -> SampledField2D {
        SampledField2D { grid: self.pgrid.b_grid, values: self.slice(is, ia).to_vec() }
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { pgrid: self.pgrid.clone(), values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn add(&self, o: &CoefficientVolume) -> Result<Self> {
        if self.pgrid != o.pgrid {
            return Err(ShearError::GridMismatch("parameter grids differ".into()));
        }
        Ok(Self { pgrid: self.pgrid.clone(), values: self.values.iter().zip(&o.values).map(|(a, b)| a + b).collect() })
    }
}

/// `∫ Φ(b,s,a) |a|^e db ds da/|a|³` by the grid's Haar quadrature.
pub fn haar_integral(vol: &CoefficientVolume, weight_exponent: f64) -> Complex64 {
    let p = &vol.pgrid;
    let cell = p.b_grid.cell_area();
    let parts: Vec<ComplexSum> = (0..p.slices())
        .into_par_iter()
        .map(|k| {
            let (is, ia) = (k % p.ns(), k / p.ns());
            let w = p.weight(is, ia) * p.a_values[ia].abs().powf(weight_exponent) * cell;
            let mut acc = ComplexSum::new();
            for v in vol.slice(is, ia) {
                acc.add(v * w);
            }
            acc
        })
        .collect();
    let mut total = ComplexSum::new();
    for p in &parts {
        total.merge(p);
    }
    total.value()
}

fn same_grid(x: &CoefficientVolume, y: &CoefficientVolume) -> Result<()> {
    if x.pgrid != y.pgrid {
        return Err(ShearError::GridMismatch("parameter grids differ".into()));
    }
    Ok(())
}

/// Bilinear Haar pairing `∫ F Φ dμ`.
pub fn haar_pairing(x: &CoefficientVolume, y: &CoefficientVolume) -> Result<Complex64> {
    same_grid(x, y)?;
    let prod = CoefficientVolume { pgrid: x.pgrid.clone(), values: x.values.iter().zip(&y.values).map(|(a, b)| a * b).collect() };
    Ok(haar_integral(&prod, 0.0))
}

/// `L²(dμ)` inner product `∫ F conj(Φ) dμ`.
pub fn haar_inner(x: &CoefficientVolume, y: &CoefficientVolume) -> Result<Complex64> {
    same_grid(x, y)?;
    let prod = CoefficientVolume { pgrid: x.pgrid.clone(), values: x.values.iter().zip(&y.values).map(|(a, b)| a * b.conj()).collect() };
    Ok(haar_integral(&prod, 0.0))
}

/// Weight and derivative orders of `p^{α1,α2,β,γ}_{k1,k2,l,m}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SeminormIndex {
    pub k1: u32,
    pub k2: u32,
    pub l: u32,
    pub m: u32,
    pub a1: u32,
    pub a2: u32,
    pub beta: u32,
    pub gamma: u32,
}

impl SeminormIndex {
    pub fn weights(k1: u32, k2: u32, l: u32, m: u32) -> Self {
        Self { k1, k2, l, m, ..Default::default() }
    }
}

/// Largest index or derivative order accepted by [`seminorm`].
pub const SEMINORM_CAP: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeminormValue {
    pub value: f64,
    /// `(i_b, i_s, i_a)` of the supremum.
    pub argmax: (usize, usize, usize),
    /// The supremum is attained off every edge of the window.
    pub interior: bool,
}

/// Central finite-difference derivative of order `k` along one axis with
/// second-order accuracy, one-sided near the ends.
fn fd_weights(nodes: &[f64], at: usize, k: usize) -> (usize, Vec<f64>) {
    let q = (k + 1 + k % 2).min(nodes.len());
    let start = (at as isize - (q / 2) as isize).clamp(0, (nodes.len() - q) as isize) as usize;
    let w = fornberg_weights(nodes[at], &nodes[start..start + q], k);
    (start, w[k].clone())
}

fn japanese(t: f64) -> f64 {
    (1.0 + t * t).sqrt()
}

/// Derivative `∂_a^γ ∂_s^β ∂_{b2}^{α2} ∂_{b1}^{α1}` of a volume.
fn derivative_volume<'a>(vol: &'a CoefficientVolume, idx: &SeminormIndex) -> Result<Cow<'a, [Complex64]>> {
    let p = &vol.pgrid;
    let (ns, na, nb) = (p.ns(), p.na(), p.b_grid.len());
    if idx.a1 + idx.a2 + idx.beta + idx.gamma == 0 {
        return Ok(Cow::Borrowed(&vol.values));
    }
    let mut v = vol.values.clone();
    if idx.a1 + idx.a2 > 0 {
        let m = [idx.a1 as usize, idx.a2 as usize];
        v = (0..p.slices())
            .into_par_iter()
            .flat_map_iter(|k| spectral_derivative(&vol.slice_field(k % ns, k / ns), m).values)
            .collect();
    }
    if idx.beta > 0 {
        if ns < 5 {
            return Err(ShearError::GridTooCoarse(format!("{ns} s-nodes for an s-derivative")));
        }
        let k = idx.beta as usize;
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        for is in 0..ns {
            let (start, w) = fd_weights(&p.s_values, is, k);
            for ia in 0..na {
                let dst = (is + ns * ia) * nb;
                for (j, wj) in w.iter().enumerate() {
                    let src = (start + j + ns * ia) * nb;
                    for i in 0..nb {
                        out[dst + i] += v[src + i] * wj;
                    }
                }
            }
        }
        v = out;
    }
    if idx.gamma > 0 {
        let k = idx.gamma as usize;
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        for neg in [true, false] {
            let branch: Vec<usize> = (0..na).filter(|&i| (p.a_values[i] < 0.0) == neg).collect();
            if branch.is_empty() {
                continue;
            }
            if branch.len() < 5 {
                return Err(ShearError::GridTooCoarse(format!("{} a-nodes on a branch for an a-derivative", branch.len())));
            }
            let nodes: Vec<f64> = branch.iter().map(|&i| p.a_values[i]).collect();
            for (pos, &ia) in branch.iter().enumerate() {
                let (start, w) = fd_weights(&nodes, pos, k);
                for is in 0..ns {
                    let dst = (is + ns * ia) * nb;
                    for (j, wj) in w.iter().enumerate() {
                        let src = (is + ns * branch[start + j]) * nb;
                        for i in 0..nb {
                            out[dst + i] += v[src + i] * wj;
                        }
                    }
                }
            }
        }
        v = out;
    }
    Ok(Cow::Owned(v))
}

fn check_index(idx: &SeminormIndex) -> Result<()> {
    let all = [idx.k1, idx.k2, idx.l, idx.m, idx.a1, idx.a2, idx.beta, idx.gamma];
    if let Some(&bad) = all.iter().find(|&&v| v > SEMINORM_CAP) {
        return Err(ShearError::OrderTooHigh { order: bad as usize, max: SEMINORM_CAP as usize });
    }
    Ok(())
}

fn seminorm_impl(vol: &CoefficientVolume, idx: &SeminormIndex, joint_b: bool) -> Result<SeminormValue> {
    check_index(idx)?;
    let p = &vol.pgrid;
    let g = p.b_grid;
    if g.n1 < 5 || g.n2 < 5 {
        return Err(ShearError::GridTooCoarse("b-grid below 5 nodes per axis".into()));
    }
    let d = derivative_volume(vol, idx)?;
    let (ns, nb) = (p.ns(), g.len());
    // squared b-weights
    let bw2: Vec<f64> = (0..nb)
        .map(|i| {
            let b = g.point(i);
            if joint_b {
                (1.0 + b[0] * b[0] + b[1] * b[1]).powi((idx.k1 + idx.k2) as i32)
            } else {
                (1.0 + b[0] * b[0]).powi(idx.k1 as i32) * (1.0 + b[1] * b[1]).powi(idx.k2 as i32)
            }
        })
        .collect();
    let best = (0..p.slices())
        .into_par_iter()
        .map(|k| {
            let (is, ia) = (k % ns, k / ns);
            let a = p.a_values[ia].abs();
            let w = japanese(p.s_values[is]).powi(idx.l as i32) * (a.powi(idx.m as i32) + a.powi(-(idx.m as i32)));
            // compare squares; one sqrt per slice
            let mut top = (0.0f64, 0usize);
            for (i, v) in d[k * nb..(k + 1) * nb].iter().enumerate() {
                let x = v.norm_sqr() * bw2[i];
                if x > top.0 {
                    top = (x, i);
                }
            }
            (top.0.sqrt() * w, top.1, is, ia)
        })
        .reduce(|| (0.0, 0, 0, 0), |x, y| if y.0 > x.0 || (y.0 == x.0 && (y.2, y.3, y.1) < (x.2, x.3, x.1)) { y } else { x });
    let (value, ib, is, ia) = best;
    let (i1, i2) = (ib % g.n1, ib / g.n1);
    let a_edge = {
        let neg = p.a_values[ia] < 0.0;
        let branch: Vec<usize> = (0..p.na()).filter(|&i| (p.a_values[i] < 0.0) == neg).collect();
        ia == branch[0] || ia == *branch.last().unwrap()
    };
    let interior = value > 0.0
        && i1 > 0
        && i1 + 1 < g.n1
        && i2 > 0
        && i2 + 1 < g.n2
        && (ns == 1 || (is > 0 && is + 1 < ns))
        && !a_edge;
    Ok(SeminormValue { value, argmax: (ib, is, ia), interior })
}

/// `sup ⟨b1⟩^{k1}⟨b2⟩^{k2}⟨s⟩^l (|a|^m + |a|^{-m}) |∂_a^γ ∂_s^β ∂_{b2}^{α2} ∂_{b1}^{α1} Φ|`.
pub fn seminorm(vol: &CoefficientVolume, idx: &SeminormIndex) -> Result<SeminormValue> {
    seminorm_impl(vol, idx, false)
}

/// The same supremum with the joint weight `⟨b⟩^{k1+k2}`.
pub fn seminorm_joint_b(vol: &CoefficientVolume, idx: &SeminormIndex) -> Result<SeminormValue> {
    seminorm_impl(vol, idx, true)
}

/// `|F(b,s,a)| ≤ C ⟨b1⟩^{ν1}⟨b2⟩^{ν1}⟨s⟩^{ν2}(|a|^{ν3} + |a|^{-ν3})/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthBound {
    pub c: f64,
    pub nu1: f64,
    pub nu2: f64,
    pub nu3: f64,
}

impl GrowthBound {
    pub fn weight(&self, g: &GroupElement) -> f64 {
        growth_weight(g, self.nu1 as i32, self.nu2 as i32, self.nu3 as i32)
    }

    pub fn bound(&self, g: &GroupElement) -> f64 {
        self.c * self.weight(g)
    }
}

fn growth_weight(g: &GroupElement, n1: i32, n2: i32, n3: i32) -> f64 {
    let a = g.a.abs();
    japanese(g.b[0]).powi(n1) * japanese(g.b[1]).powi(n1) * japanese(g.s).powi(n2) * 0.5 * (a.powi(n3) + a.powi(-n3))
}

/// Largest exponent searched by [`fit_growth_bound`].
pub const GROWTH_CAP: i32 = 6;

/// Smallest integer exponents whose bound, fitted on the inner half of the
/// sampled window, still dominates the outer samples; `C` is then the
/// least constant dominating every sample.
pub fn fit_growth_bound(samples: &[(GroupElement, Complex64)]) -> Result<GrowthBound> {
    if samples.len() < 10 {
        return Err(ShearError::TooFewSamples { got: samples.len(), need: 10 });
    }
    // inner half of each axis, measured on |b1|, |b2|, |s|, |log2|a||
    let axes: [fn(&GroupElement) -> f64; 4] = [|g| g.b[0].abs(), |g| g.b[1].abs(), |g| g.s.abs(), |g| g.a.abs().log2().abs()];
    let mid: Vec<f64> = axes
        .iter()
        .map(|f| {
            let lo = samples.iter().map(|(g, _)| f(g)).fold(f64::INFINITY, f64::min);
            let hi = samples.iter().map(|(g, _)| f(g)).fold(0.0, f64::max);
            lo + 0.5 * (hi - lo)
        })
        .collect();
    let inner: Vec<usize> =
        (0..samples.len()).filter(|&k| axes.iter().zip(&mid).all(|(f, m)| f(&samples[k].0) <= *m)).collect();
    let inner = if inner.is_empty() { (0..samples.len()).collect() } else { inner };
    let mut candidates: Vec<(i32, i32, i32)> = Vec::new();
    for n1 in 0..=GROWTH_CAP {
        for n2 in 0..=GROWTH_CAP {
            for n3 in 0..=GROWTH_CAP {
                candidates.push((n1, n2, n3));
            }
        }
    }
    candidates.sort_by_key(|&(a, b, c)| (a + b + c, a, b, c));
    for (n1, n2, n3) in candidates {
        let ratio = |k: usize| samples[k].1.norm() / growth_weight(&samples[k].0, n1, n2, n3);
        let c_inner = inner.iter().map(|&k| ratio(k)).fold(0.0, f64::max);
        let c_all = (0..samples.len()).map(ratio).fold(0.0, f64::max);
        if c_all <= c_inner * (1.0 + 1e-9) {
            let b = GrowthBound { c: c_all, nu1: n1 as f64, nu2: n2 as f64, nu3: n3 as f64 };
            debug_assert!(samples.iter().all(|(g, v)| v.norm() <= b.bound(g) * (1.0 + 1e-12)));
            return Ok(b);
        }
    }
    Err(ShearError::NoBoundWithinCap { cap: GROWTH_CAP as u32 })
}
