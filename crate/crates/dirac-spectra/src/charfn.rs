//! Characteristic functions χ(λ) for the three boundary families,
//! their minor algebra, completeness degree conditions, and asymptotic
//! leading terms.

use crate::cauchy::{FundamentalSolution, Integrator};
use crate::jet::{poly_jet, Jet, Ring};
use crate::model::{
    column_minors, validate_system, BoundaryCondition, ComplexPolynomial, Degree, GridConfig,
    LinearBc, QuadraticBc, SystemSpec,
};
use crate::{Error, Result};
use num_complex::Complex64;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

type C = Complex64;

const FUNDAMENTAL_CACHE_CAP: usize = 1024;

/// Cache key: (base index, λ bits, chain order).
type CacheKey = (usize, u64, u64, usize);
type FundamentalCache = Mutex<HashMap<CacheKey, Arc<FundamentalSolution>>>;

/// 2x2 column minors of a boundary polynomial matrix, antisymmetric in
/// the indices: `get(i, j) = -get(j, i)`.
#[derive(Debug, Clone)]
pub struct MinorTable {
    map: BTreeMap<(usize, usize), ComplexPolynomial>,
}

impl MinorTable {
    pub fn get(&self, i: usize, j: usize) -> ComplexPolynomial {
        if i == j {
            return ComplexPolynomial::zero();
        }
        if i < j {
            self.map[&(i, j)].clone()
        } else {
            self.map[&(j, i)].scale(C::new(-1.0, 0.0))
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &ComplexPolynomial)> {
        self.map.iter()
    }
}

/// All 2x2 column minors; indices 1..=4 for linear conditions, 0..=9
/// for quadratic ones (separated conditions go through their linear
/// embedding).
pub fn minors(bc: &BoundaryCondition) -> MinorTable {
    let list = match bc {
        BoundaryCondition::Linear(b) => column_minors(&b.rows[0], &b.rows[1], 1),
        BoundaryCondition::Quadratic(b) => column_minors(&b.rows[0], &b.rows[1], 0),
        BoundaryCondition::Separated(b) => {
            let lin = b.embed_linear();
            column_minors(&lin.rows[0], &lin.rows[1], 1)
        }
    };
    MinorTable {
        map: list.into_iter().collect(),
    }
}

/// Degree bookkeeping for the linear-condition completeness criterion
/// `deg J14 = deg J32 >= max(deg J13, deg J42, M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConditionReport {
    pub satisfied: bool,
    pub deg_j14: Degree,
    pub deg_j32: Degree,
    pub deg_j13: Degree,
    pub deg_j42: Degree,
    /// M = max deg P_ij.
    pub max_p_degree: Degree,
    /// N = deg J14 - M: admissible exclusion-set size.
    pub allowed_removals: Option<usize>,
}

pub fn check_linear_condition(bc: &LinearBc) -> LinearConditionReport {
    let table = minors(&BoundaryCondition::Linear(bc.clone()));
    let deg_j14 = table.get(1, 4).degree();
    let deg_j32 = table.get(3, 2).degree();
    let deg_j13 = table.get(1, 3).degree();
    let deg_j42 = table.get(4, 2).degree();
    let m = bc.max_degree();
    let satisfied = deg_j14.is_finite()
        && deg_j14 == deg_j32
        && deg_j14 >= deg_j13
        && deg_j14 >= deg_j42
        && deg_j14 >= m;
    let allowed_removals = if satisfied {
        Some(deg_j14.finite().unwrap() - m.finite().unwrap_or(0))
    } else {
        None
    };
    LinearConditionReport {
        satisfied,
        deg_j14,
        deg_j32,
        deg_j13,
        deg_j42,
        max_p_degree: m,
        allowed_removals,
    }
}

/// Degree bookkeeping for the quadratic-condition criterion
/// `deg J03 = deg J12 = M`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticConditionReport {
    pub satisfied: bool,
    pub deg_j03: Degree,
    pub deg_j12: Degree,
    pub max_p_degree: Degree,
    /// The admissible exclusion-set size equals M when satisfied.
    pub allowed_removals: Option<usize>,
}

pub fn check_quadratic_condition(bc: &QuadraticBc) -> QuadraticConditionReport {
    let table = minors(&BoundaryCondition::Quadratic(bc.clone()));
    let deg_j03 = table.get(0, 3).degree();
    let deg_j12 = table.get(1, 2).degree();
    let m = bc.max_degree();
    let satisfied = deg_j03.is_finite() && deg_j03 == deg_j12 && deg_j03 == m;
    QuadraticConditionReport {
        satisfied,
        deg_j03,
        deg_j12,
        max_p_degree: m,
        allowed_removals: if satisfied { m.finite() } else { None },
    }
}

/// Entries `Q_ij` of the linear characteristic matrix:
/// `Q_i1 = P_i1 + P_i3 φ1(1) + P_i4 φ2(1)`, `Q_i2` likewise with ψ.
pub fn linear_q_entries<T: Ring>(p: &[[T; 4]; 2], phi1: &[T; 2], psi1: &[T; 2]) -> [[T; 2]; 2] {
    let row = |i: usize| {
        [
            p[i][0]
                .r_add(&p[i][2].r_mul(&phi1[0]))
                .r_add(&p[i][3].r_mul(&phi1[1])),
            p[i][1]
                .r_add(&p[i][2].r_mul(&psi1[0]))
                .r_add(&p[i][3].r_mul(&psi1[1])),
        ]
    };
    [row(0), row(1)]
}

/// Coefficients of the quadratic system in (A, B): row i of the
/// conditions evaluated on `A φ_0 + B ψ_0` gives
/// `Q_i1 A^2 + Q_i2 A B + Q_i3 B^2` with the midpoint values below.
pub fn quadratic_q_entries<T: Ring>(p: &[[T; 10]; 2], phi: &[T; 2], psi: &[T; 2]) -> [[T; 3]; 2] {
    let row = |i: usize| {
        let pr = &p[i];
        let q1 = pr[0]
            .r_add(&pr[2].r_mul(&phi[0].r_mul(&phi[0])))
            .r_add(&pr[3].r_mul(&phi[1].r_mul(&phi[1])))
            .r_add(&pr[5].r_mul(&phi[0]))
            .r_add(&pr[6].r_mul(&phi[1]))
            .r_add(&pr[9].r_mul(&phi[0].r_mul(&phi[1])));
        let q2 = pr[2]
            .r_mul(&phi[0].r_mul(&psi[0]))
            .r_scale(2.0)
            .r_add(&pr[3].r_mul(&phi[1].r_mul(&psi[1])).r_scale(2.0))
            .r_add(&pr[4])
            .r_add(&pr[5].r_mul(&psi[0]))
            .r_add(&pr[6].r_mul(&psi[1]))
            .r_add(&pr[7].r_mul(&phi[0]))
            .r_add(&pr[8].r_mul(&phi[1]))
            .r_add(&pr[9].r_mul(&phi[0].r_mul(&psi[1]).r_add(&psi[0].r_mul(&phi[1]))));
        let q3 = pr[1]
            .r_add(&pr[2].r_mul(&psi[0].r_mul(&psi[0])))
            .r_add(&pr[3].r_mul(&psi[1].r_mul(&psi[1])))
            .r_add(&pr[7].r_mul(&psi[0]))
            .r_add(&pr[8].r_mul(&psi[1]))
            .r_add(&pr[9].r_mul(&psi[0].r_mul(&psi[1])));
        [q1, q2, q3]
    };
    [row(0), row(1)]
}

/// Minors `D_ij = det [[Q_1i, Q_1j], [Q_2i, Q_2j]]`, returned as
/// `[D_12, D_13, D_23]`.
pub fn quadratic_d_minors<T: Ring>(q: &[[T; 3]; 2]) -> [T; 3] {
    let d = |i: usize, j: usize| q[0][i].r_mul(&q[1][j]).r_sub(&q[0][j].r_mul(&q[1][i]));
    [d(0, 1), d(0, 2), d(1, 2)]
}

/// Resultant of the two quadratics as the 4x4 Sylvester determinant;
/// cross-check path for the `D13^2 - D12 D23` form.
pub fn quadratic_sylvester_det(q: &[[C; 3]; 2]) -> C {
    let z = C::new(0.0, 0.0);
    let m = nalgebra::Matrix4::new(
        q[0][0], q[0][1], q[0][2], z, //
        z, q[0][0], q[0][1], q[0][2], //
        q[1][0], q[1][1], q[1][2], z, //
        z, q[1][0], q[1][1], q[1][2],
    );
    m.determinant()
}

/// Evaluation context: one system + boundary condition + grid, with a
/// concurrent per-λ cache of fundamental solutions (the χ variants,
/// the eigensystem builders, and the diagnostics all reuse them).
pub struct CharContext {
    pub spec: SystemSpec,
    pub bc: BoundaryCondition,
    pub grid: GridConfig,
    integrator: Integrator,
    cache: FundamentalCache,
}

impl CharContext {
    pub fn new(spec: SystemSpec, bc: BoundaryCondition, grid: GridConfig) -> Result<Self> {
        validate_system(&spec)?;
        let integrator = Integrator::new(&spec, &grid)?;
        Ok(Self {
            spec,
            bc,
            grid,
            integrator,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn integrator(&self) -> &Integrator {
        &self.integrator
    }

    /// Grid node at which boundary data is sampled besides 0:
    /// x = 1 for linear/separated conditions, x = 1/2 for quadratic.
    pub fn far_node(&self) -> usize {
        match self.bc {
            BoundaryCondition::Quadratic(_) => self.grid.mid_idx(),
            _ => self.grid.n_points - 1,
        }
    }

    /// Cached fundamental solution at base 0. Entries are keyed by the
    /// exact λ bits, so hits are bit-identical to fresh evaluations.
    pub fn fundamental(&self, lambda: C, kmax: usize) -> Result<Arc<FundamentalSolution>> {
        self.fundamental_at(0, lambda, kmax)
    }

    pub fn fundamental_at(
        &self,
        alpha_idx: usize,
        lambda: C,
        kmax: usize,
    ) -> Result<Arc<FundamentalSolution>> {
        let key = (alpha_idx, lambda.re.to_bits(), lambda.im.to_bits(), kmax);
        if let Some(hit) = self.cache.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let fs = Arc::new(self.integrator.solve(alpha_idx, lambda, kmax)?);
        let mut cache = self.cache.lock().unwrap();
        if cache.len() >= FUNDAMENTAL_CACHE_CAP {
            cache.clear();
        }
        cache.insert(key, fs.clone());
        Ok(fs)
    }

    /// χ(λ) for the context's boundary family.
    pub fn chi(&self, lambda: C) -> Result<C> {
        Ok(self.chi_jet(lambda, 1)?.value())
    }

    /// χ as a jet of length `len` (value plus scaled derivatives).
    pub fn chi_jet(&self, lambda: C, len: usize) -> Result<Jet> {
        assert!(len >= 1);
        let fs = self.fundamental(lambda, len - 1)?;
        let node = self.far_node();
        match &self.bc {
            BoundaryCondition::Linear(bc) => {
                let q = linear_q_entries(
                    &poly_rows4(bc, lambda, len),
                    &fs.phi_jet(node, len),
                    &fs.psi_jet(node, len),
                );
                Ok(q[0][0].mul(&q[1][1]).sub(&q[0][1].mul(&q[1][0])))
            }
            BoundaryCondition::Separated(bc) => {
                let phi = fs.phi_jet(node, len);
                let psi = fs.psi_jet(node, len);
                let p11 = poly_jet(&bc.p11, lambda, len);
                let p12 = poly_jet(&bc.p12, lambda, len);
                let p21 = poly_jet(&bc.p21, lambda, len);
                let p22 = poly_jet(&bc.p22, lambda, len);
                let lhs = p11.mul(&p21.mul(&psi[0]).add(&p22.mul(&psi[1])));
                let rhs = p12.mul(&p21.mul(&phi[0]).add(&p22.mul(&phi[1])));
                Ok(lhs.sub(&rhs))
            }
            BoundaryCondition::Quadratic(bc) => {
                let q = quadratic_q_entries(
                    &poly_rows10(bc, lambda, len),
                    &fs.phi_jet(node, len),
                    &fs.psi_jet(node, len),
                );
                let [d12, d13, d23] = quadratic_d_minors(&q);
                Ok(d13.square().sub(&d12.mul(&d23)))
            }
        }
    }

    /// Q-entry jets for the (possibly embedded) linear conditions.
    pub fn linear_q(&self, lambda: C, len: usize) -> Result<[[Jet; 2]; 2]> {
        let bc = match &self.bc {
            BoundaryCondition::Linear(bc) => bc.clone(),
            BoundaryCondition::Separated(bc) => bc.embed_linear(),
            BoundaryCondition::Quadratic(_) => {
                return Err(Error::InvalidInput(
                    "linear Q-entries requested for quadratic conditions".into(),
                ))
            }
        };
        let fs = self.fundamental(lambda, len - 1)?;
        let node = self.grid.n_points - 1;
        Ok(linear_q_entries(
            &poly_rows4(&bc, lambda, len),
            &fs.phi_jet(node, len),
            &fs.psi_jet(node, len),
        ))
    }

    /// Quadratic coefficient jets at the midpoint.
    pub fn quadratic_q(&self, lambda: C, len: usize) -> Result<[[Jet; 3]; 2]> {
        let bc = match &self.bc {
            BoundaryCondition::Quadratic(bc) => bc,
            _ => {
                return Err(Error::InvalidInput(
                    "quadratic Q-entries requested for non-quadratic conditions".into(),
                ))
            }
        };
        let fs = self.fundamental(lambda, len - 1)?;
        let node = self.grid.mid_idx();
        Ok(quadratic_q_entries(
            &poly_rows10(bc, lambda, len),
            &fs.phi_jet(node, len),
            &fs.psi_jet(node, len),
        ))
    }
}

fn poly_rows4(bc: &LinearBc, lambda: C, len: usize) -> [[Jet; 4]; 2] {
    let row = |i: usize| {
        [
            poly_jet(&bc.rows[i][0], lambda, len),
            poly_jet(&bc.rows[i][1], lambda, len),
            poly_jet(&bc.rows[i][2], lambda, len),
            poly_jet(&bc.rows[i][3], lambda, len),
        ]
    };
    [row(0), row(1)]
}

fn poly_rows10(bc: &QuadraticBc, lambda: C, len: usize) -> [[Jet; 10]; 2] {
    let row = |i: usize| -> [Jet; 10] {
        let out: Vec<Jet> = (0..10)
            .map(|j| poly_jet(&bc.rows[i][j], lambda, len))
            .collect();
        out.try_into().unwrap()
    };
    [row(0), row(1)]
}

/// Leading-term prediction for χ at large |Im λ|.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptotePrediction {
    pub predicted: C,
    pub upper_half_plane: bool,
    /// Quadratic family, lower half-plane only: the prediction built
    /// from the alternate coefficient J01^2, reported for comparison.
    /// The implemented leading coefficient is J03^2, the coefficient
    /// of ψ_02^4(1/2).
    pub alternate: Option<C>,
}

/// Default minimum |Im λ| for asymptote evaluation.
pub fn default_asymptote_threshold(spec: &SystemSpec) -> f64 {
    5.0 / (spec.b - spec.a)
}

pub fn char_asymptote(
    ctx: &CharContext,
    lambda: C,
    min_im: Option<f64>,
) -> Result<AsymptotePrediction> {
    let threshold = min_im.unwrap_or_else(|| default_asymptote_threshold(&ctx.spec));
    if lambda.im.abs() < threshold {
        return Err(Error::BelowAsymptoteThreshold {
            im: lambda.im.abs(),
            min: threshold,
        });
    }
    let upper = lambda.im > 0.0;
    let i = C::new(0.0, 1.0);
    let (a, b) = (ctx.spec.a, ctx.spec.b);
    let table = minors(&ctx.bc);
    let predicted = match &ctx.bc {
        BoundaryCondition::Linear(_) => {
            if upper {
                table.get(3, 2).eval(lambda) * (i * a * lambda).exp()
            } else {
                table.get(1, 4).eval(lambda) * (i * b * lambda).exp()
            }
        }
        BoundaryCondition::Quadratic(_) => {
            if upper {
                let j12 = table.get(1, 2).eval(lambda);
                j12 * j12 * (2.0 * i * a * lambda).exp()
            } else {
                let j03 = table.get(0, 3).eval(lambda);
                j03 * j03 * (2.0 * i * b * lambda).exp()
            }
        }
        BoundaryCondition::Separated(bc) => {
            let n = (bc.n0 + bc.n1) as u32;
            let c11c22 = bc.leading[0] * bc.leading[3];
            let c12c21 = bc.leading[1] * bc.leading[2];
            lambda.powu(n) * (c11c22 * (i * b * lambda).exp() - c12c21 * (i * a * lambda).exp())
        }
    };
    let alternate = match &ctx.bc {
        BoundaryCondition::Quadratic(_) if !upper => {
            let j01 = table.get(0, 1).eval(lambda);
            Some(j01 * j01 * (2.0 * i * b * lambda).exp())
        }
        _ => None,
    };
    Ok(AsymptotePrediction {
        predicted,
        upper_half_plane: upper,
        alternate,
    })
}
