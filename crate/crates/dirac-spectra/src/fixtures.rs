//! Bundled example configurations used by the test suites, the
//! acceptance gate, and the shipped CLI configs.

use crate::model::{
    ComplexPolynomial, KernelFunction, LinearBc, QuadraticBc, ScalarFunction, SeparableTerm,
    SeparatedBc, SystemSpec,
};
use num_complex::Complex64;
use std::f64::consts::PI;

fn p(coeffs: &[f64]) -> ComplexPolynomial {
    ComplexPolynomial::from_reals(coeffs)
}

/// Free system on (a, b) = (-1, 1) with all-ones separated conditions:
/// χ = 2i sin λ, eigenvalues at πn.
pub fn free_separated_all_ones() -> (SystemSpec, SeparatedBc) {
    (SystemSpec::free(-1.0, 1.0), SeparatedBc::all_ones())
}

/// Factored-square quadratic conditions on the free (-1, 1) system:
/// row 1 encodes (y1(0) + y2(0))^2, row 2 encodes (y1(1/2) + y2(1/2))^2,
/// giving χ = 16 sin^4(λ/2) with 4th-order zeros at 2πn.
pub fn quadratic_worked() -> (SystemSpec, QuadraticBc) {
    let z = || p(&[0.0]);
    let mut row1 = [z(), z(), z(), z(), z(), z(), z(), z(), z(), z()];
    let mut row2 = [z(), z(), z(), z(), z(), z(), z(), z(), z(), z()];
    row1[0] = p(&[1.0]); // y1^2(0)
    row1[1] = p(&[1.0]); // y2^2(0)
    row1[4] = p(&[2.0]); // y1(0) y2(0)
    row2[2] = p(&[1.0]); // y1^2(1/2)
    row2[3] = p(&[1.0]); // y2^2(1/2)
    row2[9] = p(&[2.0]); // y1(1/2) y2(1/2)
    (SystemSpec::free(-1.0, 1.0), QuadraticBc::new([row1, row2]))
}

/// Smooth oscillatory potential with nonzero endpoint values, on
/// (a, b) = (-1, 1). The endpoint values keep the first-order
/// eigenvalue shifts at their generic O(1/n) size.
pub fn smooth_trig_system() -> SystemSpec {
    SystemSpec::new(
        -1.0,
        1.0,
        ScalarFunction::cos(0.3, PI),
        ScalarFunction::cos(0.2, 2.0).plus(ScalarFunction::sin(0.1, PI)),
    )
}

/// System with a genuine Volterra memory term (and a small smooth
/// potential); exercises the integro-differential path.
pub fn kernel_system() -> SystemSpec {
    let mut kernel = KernelFunction::zero();
    kernel.entries[0][0].push(SeparableTerm {
        f: ScalarFunction::real_constant(0.8),
        g: ScalarFunction::cos(1.0, 1.0),
    });
    kernel.entries[1][1].push(SeparableTerm {
        f: ScalarFunction::cos(0.6, 2.0),
        g: ScalarFunction::real_constant(1.0),
    });
    kernel.entries[0][1].push(SeparableTerm {
        f: ScalarFunction::monomial(Complex64::new(0.5, 0.0), 1.0),
        g: ScalarFunction::real_constant(1.0),
    });
    SystemSpec::new(
        -1.0,
        1.0,
        ScalarFunction::sin(0.1, PI),
        ScalarFunction::real_constant(0.1),
    )
    .with_kernel(kernel)
}

/// The six bundled boundary-condition examples for the completeness
/// condition checkers: three satisfy their condition, three do not.
/// Expected verdicts come from hand-computed minor degree tables.
pub struct ConditionExample {
    pub name: &'static str,
    pub linear: Option<LinearBc>,
    pub quadratic: Option<QuadraticBc>,
    pub expected_satisfied: bool,
    /// Expected exclusion-set allowance when satisfied.
    pub expected_removals: Option<usize>,
}

#[allow(clippy::vec_init_then_push)]
pub fn condition_examples() -> Vec<ConditionExample> {
    let z = || p(&[0.0]);
    let mut out = Vec::new();

    // L1: embedded all-ones separated conditions.
    // J14 = 1, J32 = -J23 = -1, J13 = J42-size constants, M = 0:
    // degrees 0 = 0 >= 0, satisfied with N = 0.
    out.push(ConditionExample {
        name: "linear-constants-separated",
        linear: Some(SeparatedBc::all_ones().embed_linear()),
        quadratic: None,
        expected_satisfied: true,
        expected_removals: Some(0),
    });

    // L2: J14 = 1 = -J32 and J13 = 1, J42 = -1 (all degree 0), but
    // P22 = λ pushes M to 1, so deg J14 >= M fails.
    out.push(ConditionExample {
        name: "linear-overweight-entry",
        linear: Some(LinearBc::new([
            [p(&[1.0]), p(&[1.0]), z(), z()],
            [z(), p(&[0.0, 1.0]), p(&[1.0]), p(&[1.0])],
        ])),
        quadratic: None,
        expected_satisfied: false,
        expected_removals: None,
    });

    // L3: J14 = λ (deg 1) but J32 = -1 (deg 0): degree equality fails.
    out.push(ConditionExample {
        name: "linear-degree-mismatch",
        linear: Some(LinearBc::new([
            [p(&[0.0, 1.0]), p(&[1.0]), z(), z()],
            [z(), z(), p(&[1.0]), p(&[1.0])],
        ])),
        quadratic: None,
        expected_satisfied: false,
        expected_removals: None,
    });

    // Q1: the factored-square worked conditions.
    // J03 = J12 = 1, M = 0: satisfied with 0 removals.
    out.push(ConditionExample {
        name: "quadratic-factored-square",
        linear: None,
        quadratic: Some(quadratic_worked().1),
        expected_satisfied: true,
        expected_removals: Some(0),
    });

    // Q2: row1 = y1^2(0) + λ y2^2(0), row2 = y1^2(1/2) + λ y2^2(1/2).
    // J03 = λ, J12 = λ, M = 1: satisfied with 1 removal.
    let mut q2_row1 = [z(), z(), z(), z(), z(), z(), z(), z(), z(), z()];
    let mut q2_row2 = [z(), z(), z(), z(), z(), z(), z(), z(), z(), z()];
    q2_row1[0] = p(&[1.0]);
    q2_row1[1] = p(&[0.0, 1.0]);
    q2_row2[2] = p(&[1.0]);
    q2_row2[3] = p(&[0.0, 1.0]);
    out.push(ConditionExample {
        name: "quadratic-degree1-balanced",
        linear: None,
        quadratic: Some(QuadraticBc::new([q2_row1, q2_row2])),
        expected_satisfied: true,
        expected_removals: Some(1),
    });

    // Q3: P12 = λ^3 forces M = 3 while J03 = λ^2 and J12 = 0.
    let mut q3_row1 = [z(), z(), z(), z(), z(), z(), z(), z(), z(), z()];
    let mut q3_row2 = [z(), z(), z(), z(), z(), z(), z(), z(), z(), z()];
    q3_row1[0] = p(&[1.0]);
    q3_row1[1] = p(&[1.0]);
    q3_row1[2] = p(&[0.0, 0.0, 0.0, 1.0]);
    q3_row2[0] = p(&[1.0]);
    q3_row2[3] = p(&[0.0, 0.0, 1.0]);
    out.push(ConditionExample {
        name: "quadratic-overweight-p12",
        linear: None,
        quadratic: Some(QuadraticBc::new([q3_row1, q3_row2])),
        expected_satisfied: false,
        expected_removals: None,
    });

    out
}
