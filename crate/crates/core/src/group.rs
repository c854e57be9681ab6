//! The shearlet group 𝕊 = ℝ² × ℝ × ℝ^× and its quasi-regular
//! representation on sampled fields.
//!
//! Product: `(b,s,a)(b',s',a') = (b + N_s A_a b', s + |a|^{1/2} s', a a')`
//! with `N_s = [[1,-s],[0,1]]` and `A_a = diag(a, a|a|^{-1/2})`. The left Haar
//! measure is `|a|^{-3} db ds da`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, ShearError};
use crate::field::{dtft, FrequencyField2D, SampledField2D, SpectralFrame, TrigInterpolant};

/// Row-major 2×2 real matrix.
pub type Mat2 = [[f64; 2]; 2];

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

pub fn mat_vec(a: &Mat2, v: [f64; 2]) -> [f64; 2] {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

pub fn transpose(a: &Mat2) -> Mat2 {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

/// `N_s = [[1, -s], [0, 1]]`.
pub fn shear_matrix(s: f64) -> Mat2 {
    [[1.0, -s], [0.0, 1.0]]
}

/// `A_a = diag(a, a|a|^{-1/2})`.
pub fn dilation_matrix(a: f64) -> Result<Mat2> {
    if a == 0.0 || !a.is_finite() {
        return Err(ShearError::ZeroDilation);
    }
    Ok([[a, 0.0], [0.0, a / a.abs().sqrt()]])
}

/// A point `(b, s, a)` of the shearlet group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement {
    pub b: [f64; 2],
    pub s: f64,
    pub a: f64,
}

impl GroupElement {
    pub fn new(b: [f64; 2], s: f64, a: f64) -> Result<Self> {
        if !(b[0].is_finite() && b[1].is_finite() && s.is_finite()) {
            return Err(ShearError::NonFinite);
        }
        if a == 0.0 || !a.is_finite() {
            return Err(ShearError::ZeroDilation);
        }
        Ok(Self { b, s, a })
    }

    pub fn identity() -> Self {
        Self { b: [0.0, 0.0], s: 0.0, a: 1.0 }
    }

    /// `A_a^{-1} N_s^{-1} = [[1/a, s/a], [0, |a|^{1/2}/a]]`.
    pub fn inverse_linear(&self) -> Mat2 {
        let r = self.a.abs().sqrt();
        [[1.0 / self.a, self.s / self.a], [0.0, r / self.a]]
    }

    /// `A_a ᵗN_s`, the frequency warp: `ξ ↦ (aξ1, a|a|^{-1/2}(ξ2 − sξ1))`.
    pub fn freq_warp(&self) -> Mat2 {
        let r = self.a.abs().sqrt();
        [[self.a, 0.0], [-self.s * self.a / r, self.a / r]]
    }

    /// `A_a^{-1} N_s^{-1} (x − b)`.
    pub fn pull_back(&self, x: [f64; 2]) -> [f64; 2] {
        mat_vec(&self.inverse_linear(), [x[0] - self.b[0], x[1] - self.b[1]])
    }

    /// `A_a ᵗN_s ξ`.
    pub fn warp_freq(&self, xi: [f64; 2]) -> [f64; 2] {
        let r = self.a.abs().sqrt();
        [self.a * xi[0], self.a / r * (xi[1] - self.s * xi[0])]
    }
}

/// The group product.
pub fn compose(g: &GroupElement, h: &GroupElement) -> GroupElement {
    let r = g.a.abs().sqrt();
    // N_s A_a b' = (a b1' − s a|a|^{-1/2} b2', a|a|^{-1/2} b2')
    let ab2 = g.a / r * h.b[1];
    GroupElement {
        b: [g.b[0] + g.a * h.b[0] - g.s * ab2, g.b[1] + ab2],
        s: g.s + r * h.s,
        a: g.a * h.a,
    }
}

/// The group inverse: `a' = 1/a`, `s' = −s|a|^{-1/2}`, `b' = −A_a^{-1}N_s^{-1} b`.
pub fn inverse(g: &GroupElement) -> GroupElement {
    let m = g.inverse_linear();
    let b = mat_vec(&m, g.b);
    GroupElement { b: [-b[0], -b[1]], s: -g.s / g.a.abs().sqrt(), a: 1.0 / g.a }
}

/// Left Haar density `|a|^{-3}`.
pub fn haar_weight(g: &GroupElement) -> f64 {
    g.a.abs().powi(-3)
}

/// `π_g f(x) = |a|^{-3/4} f(A_a^{-1} N_s^{-1}(x − b))`, resampled on the
/// grid of `f` through its trigonometric interpolant.
pub fn apply_rep_space(g: &GroupElement, f: &SampledField2D) -> Result<SampledField2D> {
    let it = TrigInterpolant::new(f);
    let pre = g.a.abs().powf(-0.75);
    let grid = f.grid;
    let values: Vec<Complex64> = (0..grid.len())
        .into_par_iter()
        .map(|i| it.eval(g.pull_back(grid.point(i))) * pre)
        .collect();
    SampledField2D::new(grid, values)
}

/// `|a|^{3/4} e^{-2πibξ} F(A_a ᵗN_s ξ)` on the grid of `spec`. Off-grid
/// values of `F` come from the Fourier transform of the sampled field it
/// represents, restricted to the fundamental band.
pub fn apply_rep_freq(g: &GroupElement, spec: &FrequencyField2D) -> Result<FrequencyField2D> {
    let frame = SpectralFrame::new(spec.space_grid());
    let f = frame.inverse(spec)?;
    let pre = g.a.abs().powf(0.75);
    let grid = spec.grid;
    let values: Vec<Complex64> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let xi = grid.point(i);
            let phase = -2.0 * PI * (g.b[0] * xi[0] + g.b[1] * xi[1]);
            dtft(&f, g.warp_freq(xi)) * Complex64::new(phase.cos(), phase.sin()) * pre
        })
        .collect();
    FrequencyField2D::new(grid, spec.space_origin, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(g: &GroupElement, h: &GroupElement, tol: f64) -> bool {
        (g.b[0] - h.b[0]).abs() <= tol
            && (g.b[1] - h.b[1]).abs() <= tol
            && (g.s - h.s).abs() <= tol
            && (g.a - h.a).abs() <= tol
    }

    #[test]
    fn matrices() {
        assert_eq!(shear_matrix(0.0), [[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(shear_matrix(1.0), [[1.0, -1.0], [0.0, 1.0]]);
        assert_eq!(mat_mul(&shear_matrix(0.3), &shear_matrix(0.4)), shear_matrix(0.7));
        assert_eq!(dilation_matrix(1.0).unwrap(), [[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(dilation_matrix(4.0).unwrap(), [[4.0, 0.0], [0.0, 2.0]]);
        assert_eq!(dilation_matrix(0.0), Err(ShearError::ZeroDilation));
        for a in [0.5, -0.5, 2.0, -2.0] {
            let m = dilation_matrix(a).unwrap();
            let det = m[0][0] * m[1][1];
            assert!((det.abs() - a.abs().powf(1.5)).abs() < 1e-15);
        }
    }

    #[test]
    fn worked_examples() {
        let g = GroupElement::new([0.0, 0.0], 1.0, 4.0).unwrap();
        let h = GroupElement::new([1.0, 1.0], 0.0, 1.0).unwrap();
        let p = compose(&g, &h);
        assert!(close(&p, &GroupElement { b: [2.0, 2.0], s: 1.0, a: 4.0 }, 1e-14));
        let inv = inverse(&p);
        assert!(close(&inv, &GroupElement { b: [-1.0, -1.0], s: -0.5, a: 0.25 }, 1e-14));
        assert_eq!(inverse(&GroupElement::identity()), GroupElement::identity());
    }

    #[test]
    fn haar_density() {
        assert_eq!(haar_weight(&GroupElement::identity()), 1.0);
        assert_eq!(haar_weight(&GroupElement::new([0.0, 0.0], 0.0, 4.0).unwrap()), 1.0 / 64.0);
        assert_eq!(haar_weight(&GroupElement::new([0.0, 0.0], 0.0, -0.5).unwrap()), 8.0);
    }

    #[test]
    fn rejects_zero_dilation() {
        assert_eq!(GroupElement::new([0.0, 0.0], 0.0, 0.0), Err(ShearError::ZeroDilation));
        assert_eq!(GroupElement::new([f64::NAN, 0.0], 0.0, 1.0), Err(ShearError::NonFinite));
    }

    #[test]
    fn warp_and_pull_back_are_dual() {
        // ⟨A^tN ξ, A^{-1}N^{-1} x⟩ = ⟨ξ, x⟩
        let g = GroupElement::new([0.0, 0.0], 0.7, -2.5).unwrap();
        let (xi, x) = ([0.3, -1.1], [2.0, 0.4]);
        let w = g.warp_freq(xi);
        let p = g.pull_back(x);
        assert!((w[0] * p[0] + w[1] * p[1] - (xi[0] * x[0] + xi[1] * x[1])).abs() < 1e-14);
        let m = g.freq_warp();
        let w2 = mat_vec(&m, xi);
        assert!((w2[0] - w[0]).abs() < 1e-15 && (w2[1] - w[1]).abs() < 1e-15);
    }
}
