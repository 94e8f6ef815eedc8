//! Domain types: the system, its potentials and kernel, boundary
//! conditions, polynomials, and grid configuration. All types are
//! immutable after construction and safe to share across threads.

mod boundary;
mod function;
mod polynomial;

pub use boundary::{
    check_rank2, column_minors, BoundaryCondition, LinearBc, QuadraticBc, RankReport, SeparatedBc,
};
pub use function::{KernelFunction, ScalarFunction, SeparableTerm, Term, TermKind};
pub use polynomial::{cluster_points, common_roots, ComplexPolynomial, Degree};

use crate::{Error, Result};

/// The 2x2 Dirac-type system: interval velocities `a < 0 < b`, the
/// off-diagonal potential entries `q1`, `q2`, and the Volterra kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub a: f64,
    pub b: f64,
    pub q1: ScalarFunction,
    pub q2: ScalarFunction,
    pub kernel: KernelFunction,
}

impl SystemSpec {
    pub fn new(a: f64, b: f64, q1: ScalarFunction, q2: ScalarFunction) -> Self {
        Self {
            a,
            b,
            q1,
            q2,
            kernel: KernelFunction::zero(),
        }
    }

    pub fn with_kernel(mut self, kernel: KernelFunction) -> Self {
        self.kernel = kernel;
        self
    }

    /// Free system: zero potential and kernel.
    pub fn free(a: f64, b: f64) -> Self {
        Self::new(a, b, ScalarFunction::zero(), ScalarFunction::zero())
    }
}

/// Quadrature rule used for L2 inner products on the solver grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadRule {
    Trapezoid,
    Simpson,
}

/// Uniform-grid and tolerance configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    /// Number of grid nodes on [0,1]; odd and >= 33 (Simpson parity).
    pub n_points: usize,
    pub quad_rule: QuadRule,
    /// Newton refinement tolerance for eigenvalue location.
    pub newton_tol: f64,
    /// Boundary samples per rectangle for winding-number counts.
    pub contour_samples: usize,
}

impl GridConfig {
    pub fn new(
        n_points: usize,
        quad_rule: QuadRule,
        newton_tol: f64,
        contour_samples: usize,
    ) -> Result<Self> {
        if n_points < 33 || n_points.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "n_points must be odd and >= 33, got {n_points}"
            )));
        }
        if !newton_tol.is_finite() || newton_tol <= 0.0 {
            return Err(Error::InvalidGrid("newton_tol must be positive".into()));
        }
        if contour_samples == 0 {
            return Err(Error::InvalidGrid(
                "contour_samples must be positive".into(),
            ));
        }
        Ok(Self {
            n_points,
            quad_rule,
            newton_tol,
            contour_samples,
        })
    }

    pub fn with_points(n_points: usize) -> Result<Self> {
        Self::new(n_points, QuadRule::Simpson, 1e-10, 64)
    }

    pub fn h(&self) -> f64 {
        1.0 / (self.n_points - 1) as f64
    }

    pub fn x(&self, idx: usize) -> f64 {
        idx as f64 * self.h()
    }

    /// Index of the midpoint node (exact since `n_points` is odd).
    pub fn mid_idx(&self) -> usize {
        (self.n_points - 1) / 2
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        Self::with_points(513).unwrap()
    }
}

/// Report produced by [`validate_system`].
#[derive(Debug, Clone, PartialEq)]
pub struct SystemReport {
    /// Both potentials consist of differentiable terms; gates the
    /// stronger asymptotic checks.
    pub smooth: bool,
    pub kernel_zero: bool,
    /// Sampled sup of |M_ij| on the triangle.
    pub kernel_bound: f64,
}

/// Checks the structural hypotheses on the system: `a < 0 < b`, finite
/// coefficients, kernel bounded on the triangle (by sampling), and
/// reports whether the potential is differentiable-kind.
pub fn validate_system(spec: &SystemSpec) -> Result<SystemReport> {
    if !spec.a.is_finite() || !spec.b.is_finite() {
        return Err(Error::InvalidSystem("a and b must be finite".into()));
    }
    if spec.a >= 0.0 {
        return Err(Error::InvalidSystem(format!(
            "a must be negative, got {}",
            spec.a
        )));
    }
    if spec.b <= 0.0 {
        return Err(Error::InvalidSystem(format!(
            "b must be positive, got {}",
            spec.b
        )));
    }
    spec.q1.validate()?;
    spec.q2.validate()?;
    spec.kernel.validate()?;
    let kernel_bound = spec.kernel.bound_on_triangle(101);
    if !kernel_bound.is_finite() {
        return Err(Error::InvalidSystem(
            "kernel is unbounded on the triangle".into(),
        ));
    }
    Ok(SystemReport {
        smooth: spec.q1.is_smooth() && spec.q2.is_smooth(),
        kernel_zero: spec.kernel.is_zero(),
        kernel_bound,
    })
}
