//! Closed-form scalar functions and separable Volterra kernels.
//!
//! Potentials and kernel factors are finite term lists rather than raw
//! grids, so they can be evaluated exactly on refined grids during
//! convergence studies.

use crate::{Error, Result};
use num_complex::Complex64;

/// A single term of a [`ScalarFunction`].
///
/// * `Monomial` with parameter `p` evaluates to `coeff * x^p`.
/// * `Trig` with parameter `p` evaluates to `coeff * exp(i p x)`; real
///   sines and cosines are built from conjugate pairs (see
///   [`ScalarFunction::sin`] / [`ScalarFunction::cos`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TermKind {
    Monomial,
    Trig,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub kind: TermKind,
    pub coeff: Complex64,
    pub param: f64,
}

impl Term {
    pub fn eval(&self, x: f64) -> Complex64 {
        match self.kind {
            TermKind::Monomial => {
                if self.param == 0.0 {
                    self.coeff
                } else if self.param.fract() == 0.0 && self.param >= 0.0 {
                    self.coeff * x.powi(self.param as i32)
                } else {
                    self.coeff * x.powf(self.param)
                }
            }
            TermKind::Trig => {
                let (s, c) = (self.param * x).sin_cos();
                self.coeff * Complex64::new(c, s)
            }
        }
    }

    /// Differentiable on all of [0,1]: trig terms always, monomials for
    /// integer powers or exponents >= 1.
    pub fn is_smooth(&self) -> bool {
        match self.kind {
            TermKind::Trig => true,
            TermKind::Monomial => self.param == 0.0 || self.param >= 1.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.coeff.re.is_finite() && self.coeff.im.is_finite() && self.param.is_finite()) {
            return Err(Error::InvalidSystem(
                "non-finite term coefficient or parameter".into(),
            ));
        }
        if matches!(self.kind, TermKind::Monomial) && self.param < 0.0 {
            return Err(Error::InvalidSystem(
                "monomial power must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// Finite sum of monomial and oscillatory terms, evaluable anywhere on
/// [0,1].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScalarFunction {
    pub terms: Vec<Term>,
}

impl ScalarFunction {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Self {
            terms: vec![Term {
                kind: TermKind::Monomial,
                coeff: c,
                param: 0.0,
            }],
        }
    }

    pub fn real_constant(c: f64) -> Self {
        Self::constant(Complex64::new(c, 0.0))
    }

    pub fn monomial(coeff: Complex64, power: f64) -> Self {
        Self {
            terms: vec![Term {
                kind: TermKind::Monomial,
                coeff,
                param: power,
            }],
        }
    }

    /// `amp * sin(freq x)` as a conjugate pair of oscillatory terms.
    pub fn sin(amp: f64, freq: f64) -> Self {
        let half = Complex64::new(0.0, -0.5 * amp);
        Self {
            terms: vec![
                Term {
                    kind: TermKind::Trig,
                    coeff: half,
                    param: freq,
                },
                Term {
                    kind: TermKind::Trig,
                    coeff: -half,
                    param: -freq,
                },
            ],
        }
    }

    /// `amp * cos(freq x)`.
    pub fn cos(amp: f64, freq: f64) -> Self {
        let half = Complex64::new(0.5 * amp, 0.0);
        Self {
            terms: vec![
                Term {
                    kind: TermKind::Trig,
                    coeff: half,
                    param: freq,
                },
                Term {
                    kind: TermKind::Trig,
                    coeff: half,
                    param: -freq,
                },
            ],
        }
    }

    pub fn plus(mut self, other: Self) -> Self {
        self.terms.extend(other.terms);
        self
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.eval(x))
            .fold(Complex64::new(0.0, 0.0), |a, b| a + b)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coeff.norm() == 0.0)
    }

    pub fn is_smooth(&self) -> bool {
        self.terms.iter().all(Term::is_smooth)
    }

    pub fn validate(&self) -> Result<()> {
        self.terms.iter().try_for_each(Term::validate)
    }
}

/// One separable product `f(x) * g(t)` of a kernel entry.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableTerm {
    pub f: ScalarFunction,
    pub g: ScalarFunction,
}

impl SeparableTerm {
    pub fn eval(&self, x: f64, t: f64) -> Complex64 {
        self.f.eval(x) * self.g.eval(t)
    }
}

/// 2x2 Volterra kernel `M(x,t)` on the triangle `0 <= t <= x <= 1`;
/// each entry is a finite sum of separable products.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct KernelFunction {
    /// `entries[i][j]` is M_{i+1,j+1}.
    pub entries: [[Vec<SeparableTerm>; 2]; 2],
}

impl KernelFunction {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(Vec::is_empty)
    }

    pub fn eval_entry(&self, i: usize, j: usize, x: f64, t: f64) -> Complex64 {
        self.entries[i][j]
            .iter()
            .map(|s| s.eval(x, t))
            .fold(Complex64::new(0.0, 0.0), |a, b| a + b)
    }

    pub fn validate(&self) -> Result<()> {
        for row in &self.entries {
            for entry in row {
                for term in entry {
                    term.f.validate()?;
                    term.g.validate()?;
                }
            }
        }
        Ok(())
    }

    /// Max entry magnitude over a lattice on the triangle.
    pub fn bound_on_triangle(&self, samples: usize) -> f64 {
        let n = samples.max(2);
        let mut bound = 0.0f64;
        for i in 0..n {
            let x = i as f64 / (n - 1) as f64;
            for j in 0..=i {
                let t = j as f64 / (n - 1) as f64;
                for p in 0..2 {
                    for q in 0..2 {
                        bound = bound.max(self.eval_entry(p, q, x, t).norm());
                    }
                }
            }
        }
        bound
    }
}
