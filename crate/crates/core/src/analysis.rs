//! The shearlet transform `S_ψ f(b,s,a) = ⟨f, π_{b,s,a}ψ⟩`.
//!
//! A sampled field stands for its trigonometric interpolant, so
//! `S_ψ f(b,s,a) = |a|^{3/4} Σ_k Δ² f̂_k conj(ψ̂(A_aᵗN_s ξ_k)) e^{2πibξ_k}`
//! exactly; on the b-grid this is one inverse FFT per `(s, a)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::coeffspace::{CoefficientVolume, ParamGrid};
use crate::error::{Result, ShearError};
use crate::field::{FrequencyField2D, Grid2D, SampledField2D, SpectralFrame};
use crate::generator::{admissibility_constant, ShearletGenerator, SpaceEvaluator};
use crate::group::GroupElement;
use crate::quadrature::{ComplexSum, KahanSum};

/// Spatial radius (in generator coordinates) of the direct-sum oracle.
pub const DIRECT_RADIUS: f64 = 48.0;

fn cis(t: f64) -> Complex64 {
    Complex64::new(t.cos(), t.sin())
}

fn warp(s: f64, a: f64, xi: [f64; 2]) -> [f64; 2] {
    let r = a.abs().sqrt();
    [a * xi[0], a / r * (xi[1] - s * xi[0])]
}

/// Spectrum of `f` with the indices of its nonzero bins.
struct Prepared {
    frame: SpectralFrame,
    spec: FrequencyField2D,
    active: Vec<usize>,
}

fn prepare(f: &SampledField2D) -> Result<Prepared> {
    let frame = SpectralFrame::new(f.grid);
    let spec = frame.forward(f)?;
    let active = (0..spec.values.len()).filter(|&i| spec.values[i] != Complex64::new(0.0, 0.0)).collect();
    Ok(Prepared { frame, spec, active })
}

impl Prepared {
    /// `S_ψ f(·, s, a)` on the b-grid.
    fn slice(&self, gen: &ShearletGenerator, s: f64, a: f64) -> Vec<Complex64> {
        let grid = self.spec.grid;
        let mut v = vec![Complex64::new(0.0, 0.0); grid.len()];
        let pre = a.abs().powf(0.75);
        let mut any = false;
        for &i in &self.active {
            let p = gen.value(warp(s, a, grid.point(i)));
            if p != Complex64::new(0.0, 0.0) {
                v[i] = self.spec.values[i] * p.conj() * pre;
                any = true;
            }
        }
        if any {
            self.frame.inverse_in_place(&mut v);
        }
        v
    }
}

fn check_pgrid(f: &SampledField2D, pgrid: &ParamGrid) -> Result<()> {
    pgrid.b_grid.check_same(&f.grid)
}

/// Calls `visit(is, ia, slice)` for every `(s, a)` slice, in parallel;
/// the visitor's results are returned in slice order.
pub fn map_slices<T: Send>(
    f: &SampledField2D,
    gen: &ShearletGenerator,
    pgrid: &ParamGrid,
    visit: impl Fn(usize, usize, Vec<Complex64>) -> T + Sync,
) -> Result<Vec<T>> {
    check_pgrid(f, pgrid)?;
    let prep = prepare(f)?;
    let ns = pgrid.ns();
    Ok((0..pgrid.slices())
        .into_par_iter()
        .map(|k| {
            let (is, ia) = (k % ns, k / ns);
            visit(is, ia, prep.slice(gen, pgrid.s_values[is], pgrid.a_values[ia]))
        })
        .collect())
}

/// `S_ψ f` on the whole parameter grid.
pub fn transform_spectral(f: &SampledField2D, gen: &ShearletGenerator, pgrid: &ParamGrid) -> Result<CoefficientVolume> {
    let slices = map_slices(f, gen, pgrid, |_, _, v| v)?;
    CoefficientVolume::new(pgrid.clone(), slices.concat())
}

/// `S_ψ f(b,s,a)` at arbitrary parameters from the spectrum sum.
pub fn transform_pointwise(f: &SampledField2D, gen: &ShearletGenerator, params: &[GroupElement]) -> Result<Vec<Complex64>> {
    let prep = prepare(f)?;
    let grid = prep.spec.grid;
    let d2 = grid.cell_area();
    Ok(params
        .par_iter()
        .map(|g| {
            let mut acc = ComplexSum::new();
            for &i in &prep.active {
                let xi = grid.point(i);
                let p = gen.value(g.warp_freq(xi));
                if p != Complex64::new(0.0, 0.0) {
                    acc.add(prep.spec.values[i] * p.conj() * cis(2.0 * PI * (g.b[0] * xi[0] + g.b[1] * xi[1])));
                }
            }
            acc.value() * (d2 * g.a.abs().powf(0.75))
        })
        .collect())
}

/// `π_gψ` summed over all periodic images, at the nodes of `grid`:
/// `Σ_n |a|^{-3/4} ψ(A_a^{-1}N_s^{-1}(x_j + nP − b))`.
///
/// The points `x_j + nP − b` form the lattice `(x0 − b) + hℤ²`; the matrix
/// is upper triangular, so each lattice row is one evaluator row.
pub fn periodized_atom(ev: &SpaceEvaluator, grid: &Grid2D, g: &GroupElement, radius: f64) -> Result<Vec<Complex64>> {
    let (n1, n2) = (grid.n1 as i64, grid.n2 as i64);
    let h = grid.spacing;
    let cone = ev.generator().support().map(|s| s.1).unwrap_or(1.0);
    let r = g.a.abs().sqrt();
    let off = [grid.origin[0] - g.b[0], grid.origin[1] - g.b[1]];
    // |y'2| = |y2|/√|a| ≤ radius/cone
    let y2_max = radius / cone * r;
    let k2_lo = ((-y2_max - off[1]) / h[1]).floor() as i64;
    let k2_hi = ((y2_max - off[1]) / h[1]).ceil() as i64;
    let rows: Vec<(i64, Vec<Complex64>)> = (k2_lo..=k2_hi)
        .into_par_iter()
        .map(|k2| -> Result<(i64, Vec<Complex64>)> {
            let y2 = off[1] + k2 as f64 * h[1];
            let yp2 = y2 / r * g.a.signum();
            let rho = radius - cone * yp2.abs();
            if rho <= 0.0 {
                return Ok((k2, Vec::new()));
            }
            // y'1 = (y1 + s y2)/a ∈ [−ρ, ρ]
            let (lo, hi) = {
                let e1 = g.a * -rho - g.s * y2;
                let e2 = g.a * rho - g.s * y2;
                (e1.min(e2), e1.max(e2))
            };
            let k1_lo = ((lo - off[0]) / h[0]).ceil() as i64;
            let k1_hi = ((hi - off[0]) / h[0]).floor() as i64;
            if k1_hi < k1_lo {
                return Ok((k2, Vec::new()));
            }
            let y1 = off[0] + k1_lo as f64 * h[0];
            let count = (k1_hi - k1_lo + 1) as usize;
            let vals = ev.eval_row(yp2, (y1 + g.s * y2) / g.a, h[0] / g.a, count, [0, 0])?;
            // fold the row into columns mod n1
            let mut folded = vec![Complex64::new(0.0, 0.0); n1 as usize];
            for (k, v) in vals.into_iter().enumerate() {
                folded[(k1_lo + k as i64).rem_euclid(n1) as usize] += v;
            }
            Ok((k2, folded))
        })
        .collect::<Result<_>>()?;
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    let pre = g.a.abs().powf(-0.75);
    for (k2, folded) in rows {
        if folded.is_empty() {
            continue;
        }
        let j2 = k2.rem_euclid(n2) as usize;
        for (j1, v) in folded.into_iter().enumerate() {
            out[j1 + grid.n1 * j2] += v * pre;
        }
    }
    Ok(out)
}

/// Direct quadrature of `|a|^{-3/4} ∫ f(x) conj(ψ(A_a^{-1}N_s^{-1}(x − b))) dx`
/// for the periodic field, with `ψ` evaluated pointwise in space.
pub fn transform_direct(f: &SampledField2D, gen: &ShearletGenerator, params: &[GroupElement]) -> Result<Vec<Complex64>> {
    transform_direct_with(f, gen, params, DIRECT_RADIUS)
}

pub fn transform_direct_with(f: &SampledField2D, gen: &ShearletGenerator, params: &[GroupElement], radius: f64) -> Result<Vec<Complex64>> {
    for g in params {
        GroupElement::new(g.b, g.s, g.a)?;
    }
    let ev = SpaceEvaluator::new(gen, radius, 0, 1)?;
    let cell = f.grid.cell_area();
    params
        .iter()
        .map(|g| {
            let atom = periodized_atom(&ev, &f.grid, g, radius)?;
            let mut acc = ComplexSum::new();
            for (v, p) in f.values.iter().zip(&atom) {
                acc.add(v * p.conj());
            }
            Ok(acc.value() * cell)
        })
        .collect()
}

/// `Σ_{s,a} w(s,a) |a|^{3/2} conj(ψ̂(Mξ)) φ̂(Mξ)`: the Fourier multiplier of
/// `S_φᵗ S_ψ` realised by the grid; tends to `C_{ψ,φ}` under refinement.
pub fn multiplier(psi: &ShearletGenerator, phi: &ShearletGenerator, pgrid: &ParamGrid, xi: [f64; 2]) -> Complex64 {
    let mut acc = ComplexSum::new();
    for (ia, &a) in pgrid.a_values.iter().enumerate() {
        let pa = a.abs().powf(1.5);
        for (is, &s) in pgrid.s_values.iter().enumerate() {
            let eta = warp(s, a, xi);
            let p = psi.value(eta);
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            acc.add(p.conj() * phi.value(eta) * (pgrid.weight(is, ia) * pa));
        }
    }
    acc.value()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageReport {
    /// Energy fraction of `f̂` where every warped `ψ̂` vanishes.
    pub uncovered_fraction: f64,
    /// Energy-weighted relative deviation of the multiplier from `C`.
    pub multiplier_defect: f64,
}

/// Fraction above which coverage counts as a gap.
pub const COVERAGE_TOL: f64 = 0.01;

/// How well the parameter grid covers the spectrum of `f`.
pub fn coverage(f: &SampledField2D, psi: &ShearletGenerator, phi: &ShearletGenerator, pgrid: &ParamGrid) -> Result<CoverageReport> {
    let prep = prepare(f)?;
    let c = admissibility_constant(psi, phi, 2)?;
    let grid = prep.spec.grid;
    let parts: Vec<(f64, f64, f64)> = prep
        .active
        .par_iter()
        .map(|&i| {
            let e = prep.spec.values[i].norm_sqr();
            let m = multiplier(psi, phi, pgrid, grid.point(i));
            let unc = if m.norm() <= 1e-12 * c.norm() { e } else { 0.0 };
            (e, unc, e * ((m - c).norm() / c.norm()))
        })
        .collect();
    let (mut tot, mut unc, mut dev) = (KahanSum::new(), KahanSum::new(), KahanSum::new());
    for (e, u, d) in parts {
        tot.add(e);
        unc.add(u);
        dev.add(d);
    }
    if tot.value() == 0.0 {
        return Err(ShearError::DegenerateInput("zero field has no spectrum to cover".into()));
    }
    Ok(CoverageReport { uncovered_fraction: unc.value() / tot.value(), multiplier_defect: dev.value() / tot.value() })
}

/// `|‖S_ψ f‖²_{L²(dμ)} − C_ψ‖f‖²| / (C_ψ‖f‖²)`, slices streamed.
pub fn isometry_defect(f: &SampledField2D, gen: &ShearletGenerator, pgrid: &ParamGrid) -> Result<f64> {
    let norm2 = f.norm_l2().powi(2);
    if norm2 == 0.0 {
        return Err(ShearError::DegenerateInput("isometry defect of the zero field".into()));
    }
    let c = admissibility_constant(gen, gen, 2)?.re;
    if !(c > 0.0) {
        return Err(ShearError::NotAdmissible(format!("C_ψ = {c}")));
    }
    let cell = f.grid.cell_area();
    let parts = map_slices(f, gen, pgrid, |is, ia, v| {
        let mut acc = KahanSum::new();
        for x in &v {
            acc.add(x.norm_sqr());
        }
        acc.value() * cell * pgrid.weight(is, ia)
    })?;
    let mut total = KahanSum::new();
    for p in parts {
        total.add(p);
    }
    Ok((total.value() - c * norm2).abs() / (c * norm2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::default_generator;
    use crate::lizorkin::fields;

    #[test]
    fn zero_field_gives_zero_volume() {
        let g = Grid2D::centered(16, 4.0).unwrap();
        let p = ParamGrid::from_values(g, vec![0.0, 0.5], vec![0.5, 1.0]).unwrap();
        let v = transform_spectral(&SampledField2D::zeros(g), &default_generator(), &p).unwrap();
        assert_eq!(v.sup(), 0.0);
        assert!(matches!(isometry_defect(&SampledField2D::zeros(g), &default_generator(), &p), Err(ShearError::DegenerateInput(_))));
    }

    #[test]
    fn pointwise_matches_grid_slices() {
        let g = Grid2D::centered(32, 8.0).unwrap();
        let f = fields::wave_packet(g, [0.8, 0.0], 2.0, 3, [0.5, -0.3]);
        let p = ParamGrid::from_values(g, vec![-0.5, 0.25], vec![-1.5, 0.8]).unwrap();
        let vol = transform_spectral(&f, &default_generator(), &p).unwrap();
        let params: Vec<GroupElement> = [(3, 1, 0), (200, 0, 1), (517, 1, 1)].iter().map(|&(i, is, ia)| p.element(i, is, ia)).collect();
        let pw = transform_pointwise(&f, &default_generator(), &params).unwrap();
        for (k, &(i, is, ia)) in [(3, 1, 0), (200, 0, 1), (517, 1, 1)].iter().enumerate() {
            assert!((vol.slice(is, ia)[i] - pw[k]).norm() < 1e-12 * vol.sup().max(1.0));
        }
    }
}
