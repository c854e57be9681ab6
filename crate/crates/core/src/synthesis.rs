//! The synthesis operator `S_ψᵗF = ∫ F(b,s,a) π_{b,s,a}ψ dμ` and
//! reconstruction `f = C_{ψ,φ}^{-1} S_φᵗ S_ψ f`.
//!
//! Frequency form: `(S_ψᵗF)^(ξ) = Σ_{s,a} w(s,a) |a|^{3/4} F̂(ξ; s,a) ψ̂(A_aᵗN_s ξ)`
//! where `F̂(·; s,a)` is the b-spectrum of a slice.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::analysis::{coverage, periodized_atom, CoverageReport, COVERAGE_TOL};
use crate::coeffspace::{CoefficientVolume, ParamGrid};
use crate::error::{Result, ShearError};
use crate::field::{SampledField2D, SpectralFrame};
use crate::generator::{admissibility_constant, ShearletGenerator, SpaceEvaluator};
use crate::lizorkin::{MomentReport, MultiIndex};
use crate::quadrature::{fornberg_weights, ComplexSum};

/// Slices summed sequentially per parallel task; fixed so the reduction
/// order never depends on the thread count.
const CHUNK: usize = 32;

fn warp(s: f64, a: f64, xi: [f64; 2]) -> [f64; 2] {
    let r = a.abs().sqrt();
    [a * xi[0], a / r * (xi[1] - s * xi[0])]
}

/// Sums `contrib(k)` over `k < n` spectrum-by-spectrum in a fixed order.
fn ordered_sum(n: usize, len: usize, contrib: impl Fn(usize, &mut [Complex64]) + Sync) -> Vec<Complex64> {
    let chunks: Vec<Vec<Complex64>> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![Complex64::new(0.0, 0.0); len];
            let mut tmp = vec![Complex64::new(0.0, 0.0); len];
            for k in c * CHUNK..((c + 1) * CHUNK).min(n) {
                tmp.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
                contrib(k, &mut tmp);
                for (a, t) in acc.iter_mut().zip(&tmp) {
                    *a += t;
                }
            }
            acc
        })
        .collect();
    let mut sums = vec![ComplexSum::new(); len];
    for ch in &chunks {
        for (s, v) in sums.iter_mut().zip(ch) {
            s.add(*v);
        }
    }
    sums.iter().map(|s| s.value()).collect()
}

/// `S_ψᵗF` on the b-grid.
pub fn synthesize(vol: &CoefficientVolume, gen: &ShearletGenerator) -> Result<SampledField2D> {
    let p = &vol.pgrid;
    let frame = SpectralFrame::new(p.b_grid);
    let freq = p.b_grid.dual();
    let ns = p.ns();
    let xis: Vec<[f64; 2]> = (0..freq.len()).map(|i| freq.point(i)).collect();
    let mut spec = ordered_sum(p.slices(), freq.len(), |k, out| {
        let (is, ia) = (k % ns, k / ns);
        let slice = vol.slice(is, ia);
        if slice.iter().all(|v| *v == Complex64::new(0.0, 0.0)) {
            return;
        }
        let (s, a) = (p.s_values[is], p.a_values[ia]);
        let w = p.weight(is, ia) * a.abs().powf(0.75);
        let mut any = false;
        for (o, xi) in out.iter_mut().zip(&xis) {
            let q = gen.value(warp(s, a, *xi));
            if q != Complex64::new(0.0, 0.0) {
                *o = q * w;
                any = true;
            }
        }
        if !any {
            return;
        }
        let mut fb = slice.to_vec();
        frame.forward_in_place(&mut fb);
        for (o, v) in out.iter_mut().zip(&fb) {
            *o *= v;
        }
    });
    frame.inverse_in_place(&mut spec);
    SampledField2D::new(p.b_grid, spec)
}

/// Direct quadrature `Σ_{s,a} w Σ_b h² F(b,s,a) π_{b,s,a}ψ(x)` for the
/// periodic field, `π_{b,s,a}ψ` from pointwise space evaluation.
pub fn synthesize_direct(vol: &CoefficientVolume, gen: &ShearletGenerator, radius: f64) -> Result<SampledField2D> {
    let p = &vol.pgrid;
    let g = p.b_grid;
    let ev = SpaceEvaluator::new(gen, radius, 0, 1)?;
    let (n1, n2) = (g.n1, g.n2);
    let cell = g.cell_area();
    let mut total = vec![ComplexSum::new(); g.len()];
    for ia in 0..p.na() {
        for is in 0..p.ns() {
            // atom anchored at b = x_0; the atom at b = x_m is its cyclic shift
            let el = p.element(0, is, ia);
            let atom = periodized_atom(&ev, &g, &el, radius)?;
            let w = p.weight(is, ia) * cell;
            let slice = vol.slice(is, ia);
            let part: Vec<Complex64> = (0..g.len())
                .into_par_iter()
                .map(|j| {
                    let (j1, j2) = (j % n1, j / n1);
                    let mut acc = ComplexSum::new();
                    for (m, fv) in slice.iter().enumerate() {
                        let (m1, m2) = (m % n1, m / n1);
                        let d = (j1 + n1 - m1) % n1 + n1 * ((j2 + n2 - m2) % n2);
                        acc.add(fv * atom[d]);
                    }
                    acc.value() * w
                })
                .collect();
            for (t, v) in total.iter_mut().zip(part) {
                t.add(v);
            }
        }
    }
    SampledField2D::new(g, total.iter().map(|s| s.value()).collect())
}

/// Fourier transform of the synthesized function at an arbitrary `ξ`:
/// `Σ_{s,a} w |a|^{3/4} ψ̂(A_aᵗN_sξ) h² Σ_b F(b) e^{-2πibξ}`.
pub fn synthesis_spectrum(vol: &CoefficientVolume, gen: &ShearletGenerator, xi: [f64; 2]) -> Complex64 {
    let p = &vol.pgrid;
    let g = p.b_grid;
    let ns = p.ns();
    let parts: Vec<Complex64> = (0..p.slices())
        .into_par_iter()
        .map(|k| {
            let (is, ia) = (k % ns, k / ns);
            let (s, a) = (p.s_values[is], p.a_values[ia]);
            let q = gen.value(warp(s, a, xi));
            if q == Complex64::new(0.0, 0.0) {
                return Complex64::new(0.0, 0.0);
            }
            let mut acc = ComplexSum::new();
            for (i, v) in vol.slice(is, ia).iter().enumerate() {
                let b = g.point(i);
                let ph = -2.0 * PI * (b[0] * xi[0] + b[1] * xi[1]);
                acc.add(v * Complex64::new(ph.cos(), ph.sin()));
            }
            acc.value() * q * (p.weight(is, ia) * a.abs().powf(0.75) * g.cell_area())
        })
        .collect();
    let mut t = ComplexSum::new();
    for v in parts {
        t.add(v);
    }
    t.value()
}

/// Moments of the synthesized function from its exact spectrum near 0.
/// The stencil spacing stays inside the strip where every warped generator
/// vanishes whenever such a strip exists.
pub fn synthesis_moments(vol: &CoefficientVolume, gen: &ShearletGenerator, up_to: usize) -> Result<MomentReport> {
    if up_to > crate::generator::DEFAULT_MAX_ORDER {
        return Err(ShearError::OrderTooHigh { order: up_to, max: crate::generator::DEFAULT_MAX_ORDER });
    }
    let amax = vol.pgrid.a_values.iter().map(|a| a.abs()).fold(0.0, f64::max);
    let strip = gen.strip_halfwidth() / amax;
    let d = if strip > 0.0 { strip / 16.0 } else { 1e-3 };
    let half = up_to.div_ceil(2) + 2;
    let nodes: Vec<f64> = (0..=2 * half).map(|j| (j as f64 - half as f64) * d).collect();
    let w = fornberg_weights(0.0, &nodes, up_to);
    let samples: Vec<Complex64> = (0..nodes.len() * nodes.len())
        .map(|k| synthesis_spectrum(vol, gen, [nodes[k % nodes.len()], nodes[k / nodes.len()]]))
        .collect();
    let mut map = BTreeMap::new();
    for m in MultiIndex::up_to(up_to) {
        let mut acc = ComplexSum::new();
        for (j2, c2) in w[m.m2].iter().enumerate() {
            for (j1, c1) in w[m.m1].iter().enumerate() {
                acc.add(samples[j1 + nodes.len() * j2] * (c1 * c2));
            }
        }
        map.insert(m, acc.value() / Complex64::new(0.0, -2.0 * PI).powu(m.order() as u32));
    }
    let max_abs = map.values().map(|v: &Complex64| v.norm()).fold(0.0, f64::max);
    Ok(MomentReport { moments: map, max_abs })
}

/// Result of `C_{ψ,φ}^{-1} S_φᵗ S_ψ f`.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub field: SampledField2D,
    pub rel_error: f64,
    pub c_psi_phi: Complex64,
    pub coverage: CoverageReport,
}

/// `C_{ψ,φ}^{-1} S_φᵗ(S_ψ f)` with slices streamed, without the coverage gate.
pub fn reconstruct_unchecked(f: &SampledField2D, psi: &ShearletGenerator, phi: &ShearletGenerator, pgrid: &ParamGrid) -> Result<Reconstruction> {
    pgrid.b_grid.check_same(&f.grid)?;
    let c = admissibility_constant(psi, phi, 2)?;
    if c.norm() == 0.0 {
        return Err(ShearError::NotAdmissible("C_ψφ = 0".into()));
    }
    let cov = coverage(f, psi, phi, pgrid)?;
    let frame = SpectralFrame::new(f.grid);
    let fhat = frame.forward(f)?.values;
    let freq = f.grid.dual();
    let xis: Vec<[f64; 2]> = (0..freq.len()).map(|i| freq.point(i)).collect();
    let ns = pgrid.ns();
    let mut spec = ordered_sum(pgrid.slices(), freq.len(), |k, out| {
        let (is, ia) = (k % ns, k / ns);
        let (s, a) = (pgrid.s_values[is], pgrid.a_values[ia]);
        let pre = a.abs().powf(0.75);
        // analysis slice S_ψ f(·, s, a) on the b-grid
        let mut slice = vec![Complex64::new(0.0, 0.0); xis.len()];
        let mut any = false;
        for (i, xi) in xis.iter().enumerate() {
            let q = psi.value(warp(s, a, *xi));
            if q != Complex64::new(0.0, 0.0) && fhat[i] != Complex64::new(0.0, 0.0) {
                slice[i] = fhat[i] * q.conj() * pre;
                any = true;
            }
        }
        if !any {
            return;
        }
        frame.inverse_in_place(&mut slice);
        // synthesis with φ
        frame.forward_in_place(&mut slice);
        let w = pgrid.weight(is, ia) * pre;
        for ((o, v), xi) in out.iter_mut().zip(&slice).zip(&xis) {
            let q = phi.value(warp(s, a, *xi));
            if q != Complex64::new(0.0, 0.0) {
                *o = v * q * w;
            }
        }
    });
    frame.inverse_in_place(&mut spec);
    let inv = c.inv();
    let field = SampledField2D::new(f.grid, spec.into_iter().map(|v| v * inv).collect())?;
    let rel_error = field.rel_l2_error(f)?;
    Ok(Reconstruction { field, rel_error, c_psi_phi: c, coverage: cov })
}

/// Pointwise reconstruction; fails with `CoverageGap` when the parameter
/// grid misses more than 1% of the spectral energy of `f`.
pub fn reconstruct(f: &SampledField2D, psi: &ShearletGenerator, phi: &ShearletGenerator, pgrid: &ParamGrid) -> Result<(SampledField2D, f64)> {
    let r = reconstruct_unchecked(f, psi, phi, pgrid)?;
    if r.coverage.uncovered_fraction > COVERAGE_TOL {
        return Err(ShearError::CoverageGap { uncovered_fraction: r.coverage.uncovered_fraction });
    }
    Ok((r.field, r.rel_error))
}
