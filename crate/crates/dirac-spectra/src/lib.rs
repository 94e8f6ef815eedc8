//! Numerical spectral workbench for 2x2 Dirac-type first-order
//! integro-differential systems on [0,1] with polynomial
//! lambda-dependent boundary conditions.
//!
//! The system under study is
//!
//! ```text
//! (1/i) B y' + Q(x) y + \int_0^x M(x,t) y(t) dt = lambda y,
//! B = diag(1/a, 1/b),  a < 0 < b,
//! ```
//!
//! with `Q` off-diagonal and `M` a bounded Volterra kernel. The crate
//! computes fundamental solutions of the Cauchy problem, assembles
//! characteristic functions for linear / quadratic / separated boundary
//! conditions, locates eigenvalues by argument-principle counting,
//! builds eigenfunction and associate-function chains, and runs the
//! Riesz-basis and completeness diagnostics.
//!
//! Module map:
//! - [`model`]: domain types (system, kernels, polynomials, boundary
//!   conditions, grids) and structural checks.
//! - [`cauchy`]: the Cauchy-problem integrator, Wronskians, growth
//!   validation.
//! - [`charfn`]: characteristic functions, minor algebra, degree
//!   conditions, asymptotic leading terms.
//! - [`spectrum`]: eigenvalue location (strip enumeration, winding
//!   numbers, Newton refinement) and asymptotics verification.
//! - [`eigensystem`]: eigen/associate function construction and
//!   boundary residual identities.
//! - [`riesz`]: rescaling operator, reference exponential basis,
//!   quadratic-closeness tails, Gram condition numbers, completeness
//!   residuals.

pub mod cauchy;
pub mod charfn;
pub mod eigensystem;
pub mod fixtures;
pub mod gridfn;
pub mod jet;
pub mod model;
pub mod riesz;
pub mod spectrum;

pub use num_complex::Complex64;

/// Highest supported order of lambda-derivative chains.
pub const MAX_LAMBDA_DERIV: usize = 4;

/// Magnitude at which the integrator aborts a sweep.
pub const DYNAMIC_RANGE_LIMIT: f64 = 1e280;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("invalid boundary condition: {0}")]
    InvalidBoundary(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dynamic range exceeded; reduce |Im λ|")]
    DynamicRange,
    #[error("zero of χ on contour after {0} dilation retries")]
    ZeroOnContour(usize),
    #[error("|Im λ| = {im:.3e} is below the asymptote threshold {min:.3e}")]
    BelowAsymptoteThreshold { im: f64, min: f64 },
    #[error("λ-derivative order {requested} exceeds supported maximum {max}")]
    DerivativeOrder { requested: usize, max: usize },
    #[error("multiplicity {0} exceeds derivative capability")]
    MultiplicityTooHigh(usize),
    #[error("zero-norm function")]
    ZeroNorm,
    #[error("enumeration mismatch: {0}")]
    EnumerationMismatch(String),
    #[error("rank-deficient Gram matrix (condition {0:.3e})")]
    RankDeficientGram(f64),
    #[error("cannot form a closed exclusion set of size {requested}; achievable sizes are 0..={available}")]
    ExclusionSize { requested: usize, available: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
