//! Truncated Taylor ("jet") arithmetic in the spectral parameter.
//!
//! A `Jet` holds the scaled derivatives `c[m] = f^(m)(λ0) / m!` of a
//! quantity at a fixed λ0. Products are Cauchy convolutions, so the
//! characteristic-function entries and the eigenfunction formulas can
//! be differentiated to arbitrary chain order without nested Leibniz
//! bookkeeping.

use crate::model::ComplexPolynomial;
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    /// `c[m] = f^(m)(λ0)/m!`; fixed length = chain order + 1.
    pub c: Vec<Complex64>,
}

impl Jet {
    pub fn zero(len: usize) -> Self {
        Self {
            c: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn constant(v: Complex64, len: usize) -> Self {
        let mut j = Self::zero(len);
        j.c[0] = v;
        j
    }

    /// The identity jet `λ ↦ λ` at λ0.
    pub fn variable(lambda0: Complex64, len: usize) -> Self {
        let mut j = Self::zero(len);
        j.c[0] = lambda0;
        if len > 1 {
            j.c[1] = Complex64::new(1.0, 0.0);
        }
        j
    }

    /// Jet from raw derivative values `d[m] = f^(m)(λ0)`.
    pub fn from_derivs(derivs: &[Complex64]) -> Self {
        let mut fact = 1.0;
        let c = derivs
            .iter()
            .enumerate()
            .map(|(m, &d)| {
                if m > 0 {
                    fact *= m as f64;
                }
                d / fact
            })
            .collect();
        Self { c }
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    pub fn value(&self) -> Complex64 {
        self.c[0]
    }

    /// Raw derivative `f^(k)(λ0)`.
    pub fn deriv(&self, k: usize) -> Complex64 {
        let mut fact = 1.0;
        for m in 1..=k {
            fact *= m as f64;
        }
        self.c[k] * fact
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.len(), other.len());
        Self {
            c: self
                .c
                .iter()
                .zip(&other.c)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.len(), other.len());
        Self {
            c: self
                .c
                .iter()
                .zip(&other.c)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            c: self.c.iter().map(|&a| -a).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            c: self.c.iter().map(|&a| a * s).collect(),
        }
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.len(), other.len());
        let n = self.len();
        let mut out = Self::zero(n);
        for i in 0..n {
            if self.c[i].norm() == 0.0 {
                continue;
            }
            for j in 0..n - i {
                out.c[i + j] += self.c[i] * other.c[j];
            }
        }
        out
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }
}

/// Minimal ring interface so the characteristic-function entry
/// formulas can be written once for plain values and for jets.
pub trait Ring: Clone {
    fn r_add(&self, other: &Self) -> Self;
    fn r_sub(&self, other: &Self) -> Self;
    fn r_mul(&self, other: &Self) -> Self;
    fn r_scale(&self, s: f64) -> Self;
}

impl Ring for Complex64 {
    fn r_add(&self, other: &Self) -> Self {
        self + other
    }
    fn r_sub(&self, other: &Self) -> Self {
        self - other
    }
    fn r_mul(&self, other: &Self) -> Self {
        self * other
    }
    fn r_scale(&self, s: f64) -> Self {
        self * s
    }
}

impl Ring for Jet {
    fn r_add(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn r_sub(&self, other: &Self) -> Self {
        self.sub(other)
    }
    fn r_mul(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn r_scale(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }
}

/// Evaluates a polynomial on the identity jet at λ0 (Horner on jets).
pub fn poly_jet(p: &ComplexPolynomial, lambda0: Complex64, len: usize) -> Jet {
    let x = Jet::variable(lambda0, len);
    let mut acc = Jet::zero(len);
    for &coeff in p.coeffs().iter().rev() {
        acc = acc.mul(&x);
        acc.c[0] += coeff;
    }
    acc
}
