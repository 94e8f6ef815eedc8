//! Sampled functions on uniform grids, quadrature, and interpolation.

use crate::model::QuadRule;
use num_complex::Complex64;

/// Composite quadrature weights applied to node values on a uniform
/// grid with step `h`. Simpson requires an odd node count.
pub fn integrate_nodes(values: &[Complex64], h: f64, rule: QuadRule) -> Complex64 {
    let n = values.len();
    assert!(n >= 2);
    match rule {
        QuadRule::Trapezoid => {
            let mut acc = (values[0] + values[n - 1]) * 0.5;
            for &v in &values[1..n - 1] {
                acc += v;
            }
            acc * h
        }
        QuadRule::Simpson => {
            assert!(n % 2 == 1, "Simpson needs an odd node count");
            let mut acc = values[0] + values[n - 1];
            for (i, &v) in values.iter().enumerate().take(n - 1).skip(1) {
                acc += v * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            acc * (h / 3.0)
        }
    }
}

pub fn integrate_real(values: &[f64], h: f64, rule: QuadRule) -> f64 {
    let complex: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    integrate_nodes(&complex, h, rule).re
}

/// A two-component function sampled on the uniform solver grid over
/// [0,1].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction2 {
    pub c1: Vec<Complex64>,
    pub c2: Vec<Complex64>,
}

impl GridFunction2 {
    pub fn zeros(n: usize) -> Self {
        Self {
            c1: vec![Complex64::new(0.0, 0.0); n],
            c2: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn len(&self) -> usize {
        self.c1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c1.is_empty()
    }

    pub fn h(&self) -> f64 {
        1.0 / (self.len() - 1) as f64
    }

    /// Samples closures over the uniform grid.
    pub fn from_fns(
        n: usize,
        f1: impl Fn(f64) -> Complex64,
        f2: impl Fn(f64) -> Complex64,
    ) -> Self {
        let h = 1.0 / (n - 1) as f64;
        Self {
            c1: (0..n).map(|i| f1(i as f64 * h)).collect(),
            c2: (0..n).map(|i| f2(i as f64 * h)).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            c1: self.c1.iter().map(|&v| v * s).collect(),
            c2: self.c2.iter().map(|&v| v * s).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            c1: self.c1.iter().zip(&other.c1).map(|(&a, &b)| a - b).collect(),
            c2: self.c2.iter().zip(&other.c2).map(|(&a, &b)| a - b).collect(),
        }
    }

    pub fn add_scaled(&mut self, other: &Self, s: Complex64) {
        for (a, &b) in self.c1.iter_mut().zip(&other.c1) {
            *a += b * s;
        }
        for (a, &b) in self.c2.iter_mut().zip(&other.c2) {
            *a += b * s;
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.c1
            .iter()
            .chain(&self.c2)
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// `⟨self, other⟩ = ∫ (u1 conj(v1) + u2 conj(v2)) dx` on [0,1].
    pub fn dot(&self, other: &Self, rule: QuadRule) -> Complex64 {
        let vals: Vec<Complex64> = (0..self.len())
            .map(|i| self.c1[i] * other.c1[i].conj() + self.c2[i] * other.c2[i].conj())
            .collect();
        integrate_nodes(&vals, self.h(), rule)
    }

    pub fn norm(&self, rule: QuadRule) -> f64 {
        self.dot(self, rule).re.max(0.0).sqrt()
    }
}

/// Cubic (4-point Lagrange) interpolation of uniformly sampled values
/// over [0,1]; one-sided stencils near the ends.
pub fn interp_cubic(values: &[Complex64], x: f64) -> Complex64 {
    let n = values.len();
    assert!(n >= 4);
    let h = 1.0 / (n - 1) as f64;
    let x = x.clamp(0.0, 1.0);
    let i = ((x / h).floor() as usize).min(n - 2);
    // stencil start: clamp so [s, s+3] is in range and brackets i
    let s = i.saturating_sub(1).min(n - 4);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..4 {
        let xk = (s + k) as f64 * h;
        let mut w = 1.0;
        for m in 0..4 {
            if m != k {
                let xm = (s + m) as f64 * h;
                w *= (x - xm) / (xk - xm);
            }
        }
        acc += values[s + k] * w;
    }
    acc
}
