//! Independent reference computations used to cross-check the fast paths.

use num_complex::Complex64;

use crate::quadrature::gauss_legendre;

/// Weights `w_j = ∫_0^1 L_j(t) dt` of the degree-7 Lagrange interpolant
/// through nodes `t = j − left`, `j = 0..8`.
fn panel_weights(left: usize) -> [f64; 8] {
    let (gx, gw) = gauss_legendre(8);
    let mut w = [0.0; 8];
    for (x, wx) in gx.iter().zip(&gw) {
        let t = 0.5 * (x + 1.0);
        for (j, wj) in w.iter_mut().enumerate() {
            let tj = j as f64 - left as f64;
            let mut l = 1.0;
            for k in 0..8 {
                if k != j {
                    let tk = k as f64 - left as f64;
                    l *= (t - tk) / (tj - tk);
                }
            }
            *wj += 0.5 * wx * l;
        }
    }
    w
}

/// `G_k = ∫_{x_0}^{x_k} f` for samples `f` at unit-spaced nodes, scaled
/// by `h`; each panel integrates the local 8-point interpolant.
pub fn cumulative_integral(f: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = f.len();
    assert!(n >= 8, "cumulative integration needs at least 8 samples");
    let tables: Vec<[f64; 8]> = (0..8).map(panel_weights).collect();
    let mut out = Vec::with_capacity(n);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    out.push(acc);
    for k in 0..n - 1 {
        // nodes k-3 ..= k+4, shifted inward near the ends
        let start = (k as isize - 3).clamp(0, n as isize - 8) as usize;
        let w = &tables[k - start];
        let mut p = Complex64::new(0.0, 0.0);
        for j in 0..8 {
            p += f[start + j] * w[j];
        }
        // Kahan step
        let y = p * h - comp;
        let t = acc + y;
        comp = (t - acc) - y;
        acc = t;
        out.push(acc);
    }
    out
}

/// Adaptive Gauss–Legendre integral of `f` on `[lo, hi]` to relative
/// tolerance `tol`, by bisection.
pub fn adaptive_integral(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
    let (gx, gw) = gauss_legendre(20);
    let rule = |a: f64, b: f64| -> f64 {
        let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
        gx.iter().zip(&gw).map(|(x, w)| w * f(c + r * x)).sum::<f64>() * r
    };
    fn go(rule: &dyn Fn(f64, f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: usize) -> f64 {
        let m = 0.5 * (a + b);
        let (l, r) = (rule(a, m), rule(m, b));
        if depth == 0 || (l + r - whole).abs() <= tol * (l + r).abs().max(1e-300) {
            return l + r;
        }
        go(rule, a, m, l, tol, depth - 1) + go(rule, m, b, r, tol, depth - 1)
    }
    go(&rule, lo, hi, rule(lo, hi), tol, 40)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panel_weights_sum_to_one() {
        for left in 0..8 {
            let s: f64 = panel_weights(left).iter().sum();
            assert!((s - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn cumulative_integral_of_cosine() {
        let h = 0.05;
        let f: Vec<Complex64> = (0..200).map(|k| Complex64::new((k as f64 * h).cos(), 0.0)).collect();
        let g = cumulative_integral(&f, h);
        for (k, v) in g.iter().enumerate() {
            assert!((v.re - (k as f64 * h).sin()).abs() < 1e-12, "{k}");
        }
    }

    #[test]
    fn adaptive_integral_of_peaked_function() {
        let v = adaptive_integral(&|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-12);
        let exact = 2.0 / 1e-2 * (1.0f64 / 1e-2).atan();
        assert!((v - exact).abs() < 1e-9 * exact);
    }
}
