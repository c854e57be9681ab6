//! Bivariate truncated Taylor series ("jets") for exact partial
//! derivatives of closed-form profiles.

/// Taylor coefficients `c_{ij}` of a function of `(ξ1, ξ2)` around a
/// point, for `i + j ≤ order`. Derivatives are `i! j! c_{ij}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    order: usize,
    c: Vec<f64>,
}

// Row i starts after Σ_{r<i} (order + 1 − r) entries.
fn tri_index(i: usize, j: usize, order: usize) -> usize {
    i * (order + 1) - i * i.saturating_sub(1) / 2 + j
}

fn tri_len(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

impl Jet {
    pub fn constant(v: f64, order: usize) -> Self {
        let mut c = vec![0.0; tri_len(order)];
        c[0] = v;
        Self { order, c }
    }

    /// The coordinate function `ξ_axis` expanded at `value`.
    pub fn variable(value: f64, axis: usize, order: usize) -> Self {
        let mut j = Self::constant(value, order);
        if order > 0 {
            let idx = if axis == 0 { tri_index(1, 0, order) } else { tri_index(0, 1, order) };
            j.c[idx] = 1.0;
        }
        j
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i + j > self.order {
            0.0
        } else {
            self.c[tri_index(i, j, self.order)]
        }
    }

    /// `∂1^i ∂2^j` at the expansion point.
    pub fn derivative(&self, i: usize, j: usize) -> f64 {
        self.coeff(i, j) * factorial(i) * factorial(j)
    }

    pub fn add(&self, o: &Jet) -> Jet {
        Jet { order: self.order, c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        Jet { order: self.order, c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, k: f64) -> Jet {
        Jet { order: self.order, c: self.c.iter().map(|a| a * k).collect() }
    }

    pub fn add_const(&self, k: f64) -> Jet {
        let mut r = self.clone();
        r.c[0] += k;
        r
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let d = self.order;
        let mut r = vec![0.0; tri_len(d)];
        for i1 in 0..=d {
            for j1 in 0..=(d - i1) {
                let a = self.c[tri_index(i1, j1, d)];
                if a == 0.0 {
                    continue;
                }
                for i2 in 0..=(d - i1 - j1) {
                    for j2 in 0..=(d - i1 - j1 - i2) {
                        r[tri_index(i1 + i2, j1 + j2, d)] += a * o.c[tri_index(i2, j2, d)];
                    }
                }
            }
        }
        Jet { order: d, c: r }
    }

    /// `f(self)` given `f, f', f'', …` at `self.value()`.
    pub fn compose(&self, derivs: &[f64]) -> Jet {
        let d = self.order;
        let mut nil = self.clone();
        nil.c[0] = 0.0;
        // Horner in the nilpotent part: Σ derivs[k]/k! N^k
        let mut acc = Jet::constant(derivs[d.min(derivs.len() - 1)] / factorial(d.min(derivs.len() - 1)), d);
        for k in (0..d.min(derivs.len() - 1)).rev() {
            acc = acc.mul(&nil).add_const(derivs[k] / factorial(k));
        }
        acc
    }

    pub fn recip(&self) -> Jet {
        let v = self.value();
        let mut ds = Vec::with_capacity(self.order + 1);
        let mut f = 1.0 / v;
        for k in 0..=self.order {
            ds.push(f);
            f *= -((k + 1) as f64) / v;
        }
        self.compose(&ds)
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        self.compose(&vec![e; self.order + 1])
    }

    pub fn div(&self, o: &Jet) -> Jet {
        self.mul(&o.recip())
    }
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |a, k| a * k as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_layout_is_dense() {
        for d in 0..=10 {
            let mut seen = vec![false; tri_len(d)];
            for i in 0..=d {
                for j in 0..=(d - i) {
                    let k = tri_index(i, j, d);
                    assert!(!seen[k]);
                    seen[k] = true;
                }
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn derivatives_of_exp_product() {
        // f = exp(x y) at (0.3, 0.7)
        let d = 6;
        let x = Jet::variable(0.3, 0, d);
        let y = Jet::variable(0.7, 1, d);
        let f = x.mul(&y).exp();
        let e = (0.21f64).exp();
        assert!((f.derivative(0, 0) - e).abs() < 1e-14);
        assert!((f.derivative(1, 0) - 0.7 * e).abs() < 1e-14);
        // ∂x∂y exp(xy) = (1 + xy) exp(xy)
        assert!((f.derivative(1, 1) - 1.21 * e).abs() < 1e-13);
        // ∂x^3 = y^3 exp
        assert!((f.derivative(3, 0) - 0.343 * e).abs() < 1e-13);
    }

    #[test]
    fn reciprocal_and_division() {
        let d = 5;
        let x = Jet::variable(2.0, 0, d);
        let r = x.recip();
        // d^k/dx^k 1/x = (-1)^k k! / x^{k+1}
        for k in 0..=d {
            let exact = (-1f64).powi(k as i32) * factorial(k) / 2f64.powi(k as i32 + 1);
            assert!((r.derivative(k, 0) - exact).abs() < 1e-13);
        }
        let y = Jet::variable(3.0, 1, d);
        let q = y.div(&x);
        assert!((q.derivative(1, 1) + 0.25).abs() < 1e-14);
    }
}
