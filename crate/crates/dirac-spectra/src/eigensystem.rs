//! Eigenfunctions and associate functions from the ω-formulas, with
//! λ-derivative chains, redundancy filtering, and boundary residual
//! identities.

use crate::charfn::{quadratic_d_minors, CharContext};
use crate::gridfn::GridFunction2;
use crate::jet::Jet;
use crate::model::{BoundaryCondition, QuadRule};
use crate::spectrum::SpectralPoint;
use crate::{Error, Result, MAX_LAMBDA_DERIV};
use num_complex::Complex64;
use std::io::Write;

type C = Complex64;

/// One eigen- or associate function: the order-k member of the chain
/// `(1/k!) ∂_λ^k ω_branch` at an eigenvalue.
#[derive(Debug, Clone)]
pub struct RootFunction {
    pub eigenvalue: SpectralPoint,
    pub branch: u8,
    pub order: usize,
    pub samples: GridFunction2,
    pub l2_norm: f64,
}

impl RootFunction {
    /// CSV dump: x plus the four real components.
    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        use crate::cauchy::fmt17;
        writeln!(w, "x,re_u1,im_u1,re_u2,im_u2")?;
        let h = self.samples.h();
        for i in 0..self.samples.len() {
            writeln!(
                w,
                "{},{},{},{},{}",
                fmt17(i as f64 * h),
                fmt17(self.samples.c1[i].re),
                fmt17(self.samples.c1[i].im),
                fmt17(self.samples.c2[i].re),
                fmt17(self.samples.c2[i].im),
            )?;
        }
        Ok(())
    }
}

/// Branch coefficient jets (cφ, cψ) such that ω = cφ φ_0 - cψ ψ_0.
fn branch_coefficients(ctx: &CharContext, lambda: C, len: usize) -> Result<[(Jet, Jet); 2]> {
    match &ctx.bc {
        BoundaryCondition::Linear(_) | BoundaryCondition::Separated(_) => {
            let q = ctx.linear_q(lambda, len)?;
            Ok([
                (q[0][1].clone(), q[0][0].clone()),
                (q[1][1].clone(), q[1][0].clone()),
            ])
        }
        BoundaryCondition::Quadratic(_) => {
            let q = ctx.quadratic_q(lambda, len)?;
            let [d12, d13, d23] = quadratic_d_minors(&q);
            Ok([(d13.clone(), d12), (d23, d13)])
        }
    }
}

/// The full chain `(1/k!) ∂_λ^k ω_branch` for k = 0..len-1 at λ,
/// unfiltered. Each member satisfies the system with inhomogeneity
/// equal to the previous one.
pub fn omega_chain(
    ctx: &CharContext,
    lambda: C,
    branch: u8,
    len: usize,
) -> Result<Vec<GridFunction2>> {
    assert!(branch == 1 || branch == 2);
    if len == 0 || len > MAX_LAMBDA_DERIV + 1 {
        return Err(Error::MultiplicityTooHigh(len));
    }
    let coeffs = branch_coefficients(ctx, lambda, len)?;
    let (cphi, cpsi) = &coeffs[(branch - 1) as usize];
    let fs = ctx.fundamental(lambda, len - 1)?;
    let n = fs.n();
    let mut out = vec![GridFunction2::zeros(n); len];
    for node in 0..n {
        let phi = fs.phi_jet(node, len);
        let psi = fs.psi_jet(node, len);
        let w1 = cphi.mul(&phi[0]).sub(&cpsi.mul(&psi[0]));
        let w2 = cphi.mul(&phi[1]).sub(&cpsi.mul(&psi[1]));
        for (k, slot) in out.iter_mut().enumerate() {
            slot.c1[node] = w1.c[k];
            slot.c2[node] = w2.c[k];
        }
    }
    Ok(out)
}

/// The order-0 function ω_branch at an arbitrary λ (not necessarily an
/// eigenvalue); used by the residual identities and the diagnostics.
pub fn omega(ctx: &CharContext, lambda: C, branch: u8) -> Result<GridFunction2> {
    Ok(omega_chain(ctx, lambda, branch, 1)?.pop().unwrap())
}

/// Builds the eigen/associate system at a located eigenvalue: chains of
/// both branches up to the multiplicity, with numerically-zero members
/// dropped and a maximal independent subset kept (modified
/// Gram-Schmidt rank filter, tolerance 1e-8, ordered by (order, branch)).
pub fn build_root_functions(ctx: &CharContext, pt: &SpectralPoint) -> Result<Vec<RootFunction>> {
    let mult = pt.multiplicity;
    if mult == 0 || mult > MAX_LAMBDA_DERIV + 1 {
        return Err(Error::MultiplicityTooHigh(mult));
    }
    let chain1 = omega_chain(ctx, pt.lambda, 1, mult)?;
    let chain2 = omega_chain(ctx, pt.lambda, 2, mult)?;

    let mut candidates: Vec<(usize, u8, GridFunction2)> = Vec::with_capacity(2 * mult);
    for k in 0..mult {
        candidates.push((k, 1, chain1[k].clone()));
        candidates.push((k, 2, chain2[k].clone()));
    }

    let scale = candidates
        .iter()
        .map(|(_, _, f)| f.sup_norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let rule = ctx.grid.quad_rule;

    let mut kept: Vec<RootFunction> = Vec::new();
    let mut basis: Vec<GridFunction2> = Vec::new();
    for (order, branch, samples) in candidates {
        if samples.sup_norm() < 1e-10 * scale {
            continue;
        }
        let original_norm = samples.norm(rule);
        let mut residual = samples.clone();
        for e in &basis {
            let coeff = residual.dot(e, rule);
            residual.add_scaled(e, -coeff);
        }
        let res_norm = residual.norm(rule);
        if res_norm <= 1e-8 * original_norm {
            continue;
        }
        basis.push(residual.scale(C::new(1.0 / res_norm, 0.0)));
        kept.push(RootFunction {
            eigenvalue: pt.clone(),
            branch,
            order,
            l2_norm: original_norm,
            samples,
        });
    }
    Ok(kept)
}

/// Applies both boundary rows to a sampled function at the nodes the
/// family reads (0 and 1 for linear/separated, 0 and 1/2 for
/// quadratic); returns (row 1, row 2).
pub fn bc_residual(bc: &BoundaryCondition, y: &GridFunction2, lambda: C) -> (C, C) {
    let n = y.len();
    let last = n - 1;
    match bc {
        BoundaryCondition::Linear(b) => {
            let vals = [y.c1[0], y.c2[0], y.c1[last], y.c2[last]];
            let row = |i: usize| {
                (0..4)
                    .map(|j| b.rows[i][j].eval(lambda) * vals[j])
                    .fold(C::new(0.0, 0.0), |a, v| a + v)
            };
            (row(0), row(1))
        }
        BoundaryCondition::Separated(b) => (
            b.p11.eval(lambda) * y.c1[0] + b.p12.eval(lambda) * y.c2[0],
            b.p21.eval(lambda) * y.c1[last] + b.p22.eval(lambda) * y.c2[last],
        ),
        BoundaryCondition::Quadratic(b) => {
            assert!(n % 2 == 1, "quadratic residual needs the midpoint node");
            let mid = last / 2;
            let (u1, u2, v1, v2) = (y.c1[0], y.c2[0], y.c1[mid], y.c2[mid]);
            let monos = [
                u1 * u1,
                u2 * u2,
                v1 * v1,
                v2 * v2,
                u1 * u2,
                u1 * v1,
                u1 * v2,
                u2 * v1,
                u2 * v2,
                v1 * v2,
            ];
            let row = |i: usize| {
                (0..10)
                    .map(|j| b.rows[i][j].eval(lambda) * monos[j])
                    .fold(C::new(0.0, 0.0), |a, v| a + v)
            };
            (row(0), row(1))
        }
    }
}

/// Rescales to unit norm in `L2[0,1] ⊕ L2[0,1]`.
pub fn normalize(rf: &RootFunction, rule: QuadRule) -> Result<RootFunction> {
    let norm = rf.samples.norm(rule);
    if norm < 1e-300 {
        return Err(Error::ZeroNorm);
    }
    Ok(RootFunction {
        eigenvalue: rf.eigenvalue.clone(),
        branch: rf.branch,
        order: rf.order,
        samples: rf.samples.scale(C::new(1.0 / norm, 0.0)),
        l2_norm: 1.0,
    })
}
