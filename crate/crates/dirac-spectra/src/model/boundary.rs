//! Boundary-condition families and their structural checks.

use super::polynomial::{common_roots, ComplexPolynomial, Degree};
use crate::{Error, Result};
use num_complex::Complex64;

/// General linear conditions: two rows of polynomials applied to
/// `(y1(0), y2(0), y1(1), y2(1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearBc {
    pub rows: [[ComplexPolynomial; 4]; 2],
}

impl LinearBc {
    pub fn new(rows: [[ComplexPolynomial; 4]; 2]) -> Self {
        Self { rows }
    }

    /// Max degree over all entries.
    pub fn max_degree(&self) -> Degree {
        self.rows
            .iter()
            .flatten()
            .map(ComplexPolynomial::degree)
            .max()
            .unwrap()
    }
}

/// General quadratic conditions: two rows of ten polynomials applied to
/// the monomials
/// `y1^2(0), y2^2(0), y1^2(1/2), y2^2(1/2), y1(0)y2(0), y1(0)y1(1/2),
///  y1(0)y2(1/2), y2(0)y1(1/2), y2(0)y2(1/2), y1(1/2)y2(1/2)`
/// in that column order.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticBc {
    pub rows: [[ComplexPolynomial; 10]; 2],
}

impl QuadraticBc {
    pub fn new(rows: [[ComplexPolynomial; 10]; 2]) -> Self {
        Self { rows }
    }

    pub fn max_degree(&self) -> Degree {
        self.rows
            .iter()
            .flatten()
            .map(ComplexPolynomial::degree)
            .max()
            .unwrap()
    }
}

/// Separated conditions: one polynomial row at `x = 0`, one at `x = 1`.
///
/// Construction enforces the structural hypotheses: equal degrees
/// within each row, coprimality of each pair (checked via a scaled
/// resultant), and nonzero leading coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparatedBc {
    pub p11: ComplexPolynomial,
    pub p12: ComplexPolynomial,
    pub p21: ComplexPolynomial,
    pub p22: ComplexPolynomial,
    pub n0: usize,
    pub n1: usize,
    /// Leading coefficients (C11, C12, C21, C22).
    pub leading: [Complex64; 4],
}

impl SeparatedBc {
    pub fn new(
        p11: ComplexPolynomial,
        p12: ComplexPolynomial,
        p21: ComplexPolynomial,
        p22: ComplexPolynomial,
    ) -> Result<Self> {
        let n0 = match (p11.degree(), p12.degree()) {
            (Degree::Of(d1), Degree::Of(d2)) if d1 == d2 => d1,
            _ => {
                return Err(Error::InvalidBoundary(
                    "separated conditions need deg p11 = deg p12 (finite)".into(),
                ))
            }
        };
        let n1 = match (p21.degree(), p22.degree()) {
            (Degree::Of(d1), Degree::Of(d2)) if d1 == d2 => d1,
            _ => {
                return Err(Error::InvalidBoundary(
                    "separated conditions need deg p21 = deg p22 (finite)".into(),
                ))
            }
        };
        for (pair, (p, q)) in [("(p11,p12)", (&p11, &p12)), ("(p21,p22)", (&p21, &p22))] {
            if !coprime(p, q) {
                return Err(Error::InvalidBoundary(format!(
                    "{pair} must be relatively prime"
                )));
            }
        }
        let leading = [p11.leading(), p12.leading(), p21.leading(), p22.leading()];
        if leading.iter().any(|c| c.norm() == 0.0) {
            return Err(Error::InvalidBoundary(
                "separated conditions need nonzero leading coefficients".into(),
            ));
        }
        Ok(Self {
            p11,
            p12,
            p21,
            p22,
            n0,
            n1,
            leading,
        })
    }

    pub fn constants(c11: Complex64, c12: Complex64, c21: Complex64, c22: Complex64) -> Result<Self> {
        Self::new(
            ComplexPolynomial::constant(c11),
            ComplexPolynomial::constant(c12),
            ComplexPolynomial::constant(c21),
            ComplexPolynomial::constant(c22),
        )
    }

    /// All-ones constant conditions (`y1 + y2 = 0` at both ends).
    pub fn all_ones() -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self::constants(one, one, one, one).unwrap()
    }

    /// Leading ratio `R = (C11 C22) / (C12 C21)` of the two-exponential
    /// model derived from the zero-potential closed form of χ. The
    /// model roots are `(i Ln R + 2 π n) / (b - a)`.
    pub fn leading_ratio(&self) -> Complex64 {
        (self.leading[0] * self.leading[3]) / (self.leading[1] * self.leading[2])
    }

    /// Alternative row-wise pairing `(C11 C21) / (C12 C22)` of the
    /// leading coefficients; reported alongside the derived ratio for
    /// comparison between the two conventions.
    pub fn row_paired_ratio(&self) -> Complex64 {
        (self.leading[0] * self.leading[2]) / (self.leading[1] * self.leading[3])
    }

    /// Lossless embedding into the linear family:
    /// row 1 = (p11, p12, 0, 0), row 2 = (0, 0, p21, p22).
    pub fn embed_linear(&self) -> LinearBc {
        let z = ComplexPolynomial::zero;
        LinearBc::new([
            [self.p11.clone(), self.p12.clone(), z(), z()],
            [z(), z(), self.p21.clone(), self.p22.clone()],
        ])
    }

    /// Inverse of [`Self::embed_linear`] when the zero pattern matches.
    pub fn from_embedded(bc: &LinearBc) -> Option<Self> {
        let zero = ComplexPolynomial::zero();
        if bc.rows[0][2] == zero
            && bc.rows[0][3] == zero
            && bc.rows[1][0] == zero
            && bc.rows[1][1] == zero
        {
            Self::new(
                bc.rows[0][0].clone(),
                bc.rows[0][1].clone(),
                bc.rows[1][2].clone(),
                bc.rows[1][3].clone(),
            )
            .ok()
        } else {
            None
        }
    }
}

fn coprime(p: &ComplexPolynomial, q: &ComplexPolynomial) -> bool {
    let (n, m) = match (p.degree().finite(), q.degree().finite()) {
        (Some(n), Some(m)) => (n, m),
        _ => return false,
    };
    if n == 0 || m == 0 {
        return true;
    }
    let scale = p.coeff_scale().powi(m as i32) * q.coeff_scale().powi(n as i32);
    p.resultant(q).norm() > 1e-10 * scale.max(f64::MIN_POSITIVE)
}

/// Tagged union over the three boundary families.
#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum BoundaryCondition {
    Linear(LinearBc),
    Quadratic(QuadraticBc),
    Separated(SeparatedBc),
}

impl BoundaryCondition {
    pub fn family(&self) -> &'static str {
        match self {
            BoundaryCondition::Linear(_) => "linear",
            BoundaryCondition::Quadratic(_) => "quadratic",
            BoundaryCondition::Separated(_) => "separated",
        }
    }
}

/// 2x2 column minors `J_ij = det [[P_1i, P_1j], [P_2i, P_2j]]` of a
/// two-row polynomial matrix. Returned for `i < j` with the column
/// indexing of the family (1..=4 linear, 0..=9 quadratic).
pub fn column_minors(
    row1: &[ComplexPolynomial],
    row2: &[ComplexPolynomial],
    base_index: usize,
) -> Vec<((usize, usize), ComplexPolynomial)> {
    let k = row1.len();
    let mut out = Vec::new();
    for i in 0..k {
        for j in (i + 1)..k {
            let m = row1[i].mul(&row2[j]).sub(&row1[j].mul(&row2[i]));
            out.push(((base_index + i, base_index + j), m));
        }
    }
    out
}

/// Outcome of the all-lambda rank-2 check.
#[derive(Debug, Clone, PartialEq)]
pub struct RankReport {
    pub rank2_for_all_lambda: bool,
    /// A lambda at which the rank drops, when one exists.
    pub witness: Option<Complex64>,
}

/// Rank of the boundary polynomial matrix is 2 for every lambda iff
/// the not-identically-zero minors have no common root (and at least
/// one minor is nonzero). Root clustering tolerance 1e-8.
pub fn check_rank2(bc: &BoundaryCondition) -> RankReport {
    let minors = match bc {
        BoundaryCondition::Linear(b) => column_minors(&b.rows[0], &b.rows[1], 1),
        BoundaryCondition::Quadratic(b) => column_minors(&b.rows[0], &b.rows[1], 0),
        BoundaryCondition::Separated(b) => {
            let lin = b.embed_linear();
            column_minors(&lin.rows[0], &lin.rows[1], 1)
        }
    };
    let polys: Vec<&ComplexPolynomial> = minors.iter().map(|(_, p)| p).collect();
    match common_roots(&polys, 1e-8) {
        None => RankReport {
            // every minor vanishes identically: rank < 2 everywhere
            rank2_for_all_lambda: false,
            witness: Some(Complex64::new(0.0, 0.0)),
        },
        Some(roots) if roots.is_empty() => RankReport {
            rank2_for_all_lambda: true,
            witness: None,
        },
        Some(mut roots) => {
            roots.sort_by(|u, v| {
                (u.re, u.im)
                    .partial_cmp(&(v.re, v.im))
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            RankReport {
                rank2_for_all_lambda: false,
                witness: Some(roots[0]),
            }
        }
    }
}
