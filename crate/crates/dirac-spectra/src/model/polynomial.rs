//! Complex polynomials in the spectral parameter.
//!
//! Coefficients are stored in ascending order with exact trailing zeros
//! trimmed, so `degree` is `len - 1` for nonzero polynomials. The zero
//! polynomial carries a distinct `Degree::NegInf` sentinel so that the
//! degree comparisons in the completeness conditions cannot silently
//! pass with vanishing minors.

use num_complex::Complex64;
use std::fmt;

/// Degree of a polynomial, with a `-inf`-like sentinel for the zero
/// polynomial. `NegInf` compares below every finite degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Degree {
    NegInf,
    Of(usize),
}

impl Degree {
    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::NegInf => None,
            Degree::Of(d) => Some(d),
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Degree::Of(_))
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInf => write!(f, "-inf"),
            Degree::Of(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPolynomial {
    coeffs: Vec<Complex64>,
}

impl ComplexPolynomial {
    /// Builds a polynomial from ascending coefficients, trimming exact
    /// trailing zeros. Panics on non-finite coefficients; config-facing
    /// layers validate finiteness before construction.
    pub fn new(coeffs: impl Into<Vec<Complex64>>) -> Self {
        let mut coeffs = coeffs.into();
        for c in &coeffs {
            assert!(
                c.re.is_finite() && c.im.is_finite(),
                "non-finite polynomial coefficient"
            );
        }
        while coeffs.last() == Some(&Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    pub fn from_reals(coeffs: &[f64]) -> Self {
        Self::new(
            coeffs
                .iter()
                .map(|&r| Complex64::new(r, 0.0))
                .collect::<Vec<_>>(),
        )
    }

    /// `x` as a polynomial; convenient in tests.
    pub fn variable() -> Self {
        Self::from_reals(&[0.0, 1.0])
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Degree {
        if self.coeffs.is_empty() {
            Degree::NegInf
        } else {
            Degree::Of(self.coeffs.len() - 1)
        }
    }

    /// Leading coefficient; zero for the zero polynomial.
    pub fn leading(&self) -> Complex64 {
        self.coeffs
            .last()
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Term-by-term evaluation; used as an independent cross-check of
    /// Horner in tests.
    pub fn eval_terms(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut zp = Complex64::new(1.0, 0.0);
        for &c in &self.coeffs {
            acc += c * zp;
            zp *= z;
        }
        acc
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, &c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        Self::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .map(|&a| a * c)
                .collect::<Vec<_>>(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out =
            vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, &c)| c * (i as f64 + 1.0))
                .collect::<Vec<_>>(),
        )
    }

    /// k-th derivative.
    pub fn derivative_n(&self, k: usize) -> Self {
        let mut p = self.clone();
        for _ in 0..k {
            p = p.derivative();
        }
        p
    }

    /// Largest coefficient magnitude; zero polynomial gives 0.
    pub fn coeff_scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// All complex roots by Durand-Kerner iteration on the monic
    /// normalization. Adequate for the small degrees that occur in
    /// boundary-condition minors.
    pub fn roots(&self) -> Vec<Complex64> {
        let deg = match self.degree() {
            Degree::NegInf | Degree::Of(0) => return Vec::new(),
            Degree::Of(d) => d,
        };
        let lead = self.leading();
        let monic: Vec<Complex64> = self.coeffs.iter().map(|&c| c / lead).collect();
        let eval_monic = |z: Complex64| {
            let mut acc = Complex64::new(0.0, 0.0);
            for &c in monic.iter().rev() {
                acc = acc * z + c;
            }
            acc
        };
        // radius bound: 1 + max |c_i|
        let radius = 1.0
            + monic[..deg]
                .iter()
                .map(|c| c.norm())
                .fold(0.0, f64::max);
        let seed = Complex64::new(0.4, 0.9);
        let mut zs: Vec<Complex64> = (0..deg)
            .map(|k| seed.powu(k as u32 + 1) * radius.max(1.0))
            .collect();
        for _ in 0..300 {
            let mut max_step = 0.0f64;
            for i in 0..deg {
                let mut denom = Complex64::new(1.0, 0.0);
                for j in 0..deg {
                    if j != i {
                        denom *= zs[i] - zs[j];
                    }
                }
                if denom.norm() < 1e-300 {
                    // coincident iterates; nudge
                    zs[i] += Complex64::new(1e-8, 1e-8);
                    continue;
                }
                let step = eval_monic(zs[i]) / denom;
                zs[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + zs[i].norm()));
            }
            if max_step < 1e-14 {
                break;
            }
        }
        zs
    }

    /// Resultant of `self` and `other` via the Sylvester determinant.
    /// Zero (numerically) iff the polynomials share a root.
    pub fn resultant(&self, other: &Self) -> Complex64 {
        let n = match self.degree() {
            Degree::NegInf => return Complex64::new(0.0, 0.0),
            Degree::Of(d) => d,
        };
        let m = match other.degree() {
            Degree::NegInf => return Complex64::new(0.0, 0.0),
            Degree::Of(d) => d,
        };
        if n == 0 {
            return self.coeffs[0].powu(m as u32);
        }
        if m == 0 {
            return other.coeffs[0].powu(n as u32);
        }
        let size = n + m;
        let mut mat = nalgebra::DMatrix::<Complex64>::zeros(size, size);
        // m rows of self's coefficients (descending), n rows of other's
        for r in 0..m {
            for (k, &c) in self.coeffs.iter().rev().enumerate() {
                mat[(r, r + k)] = c;
            }
        }
        for r in 0..n {
            for (k, &c) in other.coeffs.iter().rev().enumerate() {
                mat[(m + r, r + k)] = c;
            }
        }
        mat.lu().determinant()
    }
}

/// Clusters `roots` with tolerance `tol`, returning representatives.
pub fn cluster_points(points: &[Complex64], tol: f64) -> Vec<Complex64> {
    let mut reps: Vec<(Complex64, usize)> = Vec::new();
    for &p in points {
        match reps.iter_mut().find(|(r, _)| (*r - p).norm() <= tol) {
            Some((r, k)) => {
                // running mean keeps clusters centered
                *r = (*r * (*k as f64) + p) / (*k as f64 + 1.0);
                *k += 1;
            }
            None => reps.push((p, 1)),
        }
    }
    reps.into_iter().map(|(r, _)| r).collect()
}

/// Common roots of a family of polynomials, ignoring identically-zero
/// members (they vanish everywhere and impose no constraint). Returns
/// `None` when every polynomial is zero.
pub fn common_roots(polys: &[&ComplexPolynomial], tol: f64) -> Option<Vec<Complex64>> {
    let nonzero: Vec<&ComplexPolynomial> =
        polys.iter().copied().filter(|p| !p.is_zero()).collect();
    if nonzero.is_empty() {
        return None;
    }
    if nonzero.iter().any(|p| p.degree() == Degree::Of(0)) {
        return Some(Vec::new());
    }
    let mut candidates = cluster_points(&nonzero[0].roots(), tol);
    for p in &nonzero[1..] {
        if candidates.is_empty() {
            break;
        }
        let roots = p.roots();
        candidates.retain(|c| roots.iter().any(|r| (r - c).norm() <= tol));
    }
    Some(candidates)
}
