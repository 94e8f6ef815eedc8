//! Riesz-basis diagnostics: the interval-rescaling operator, the
//! reference exponential basis, quadratic-closeness tail sums, Gram
//! condition numbers, completeness residuals, and exclusion sets.

use crate::charfn::CharContext;
use crate::gridfn::{integrate_nodes, interp_cubic, GridFunction2};
use crate::jet::poly_jet;
use crate::model::{BoundaryCondition, QuadRule, SeparatedBc, SystemSpec};
use crate::spectrum::SpectralPoint;
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

type C = Complex64;

/// A closed set of removed root functions: if (λ, k) is removed, every
/// higher order of the same chain is removed too.
#[derive(Debug, Clone, PartialEq)]
pub struct ExclusionSet {
    pub removed: Vec<(C, usize)>,
    pub target_size: usize,
}

#[derive(Debug, Clone)]
pub enum ExclusionStrategy {
    /// Remove whole chains at smallest |λ| first, trimming each chain
    /// from its highest order downward.
    LowestModulus,
    Explicit(Vec<(C, usize)>),
}

/// Selects exactly `n` root functions to exclude, respecting chain
/// closure. Chain lengths equal the eigenvalue multiplicities.
pub fn select_exclusion(
    points: &[SpectralPoint],
    n: usize,
    strategy: &ExclusionStrategy,
) -> Result<ExclusionSet> {
    let available: usize = points.iter().map(|p| p.multiplicity).sum();
    if n > available {
        return Err(Error::ExclusionSize {
            requested: n,
            available,
        });
    }
    match strategy {
        ExclusionStrategy::LowestModulus => {
            let mut order: Vec<&SpectralPoint> = points.iter().collect();
            order.sort_by(|u, v| {
                u.lambda
                    .norm()
                    .partial_cmp(&v.lambda.norm())
                    .unwrap()
                    .then(u.lambda.re.partial_cmp(&v.lambda.re).unwrap())
            });
            let mut removed = Vec::with_capacity(n);
            'outer: for pt in order {
                for k in (0..pt.multiplicity).rev() {
                    if removed.len() == n {
                        break 'outer;
                    }
                    removed.push((pt.lambda, k));
                }
            }
            Ok(ExclusionSet {
                removed,
                target_size: n,
            })
        }
        ExclusionStrategy::Explicit(list) => {
            if list.len() != n {
                return Err(Error::ExclusionSize {
                    requested: n,
                    available: list.len(),
                });
            }
            for &(lambda, k) in list {
                let pt = points
                    .iter()
                    .find(|p| (p.lambda - lambda).norm() < 1e-9)
                    .ok_or_else(|| {
                        Error::InvalidInput(format!("{lambda} is not a located eigenvalue"))
                    })?;
                for higher in (k + 1)..pt.multiplicity {
                    if !list
                        .iter()
                        .any(|&(l, o)| (l - lambda).norm() < 1e-9 && o == higher)
                    {
                        return Err(Error::InvalidInput(format!(
                            "exclusion set not closed: ({lambda}, {k}) without order {higher}"
                        )));
                    }
                }
            }
            Ok(ExclusionSet {
                removed: list.clone(),
                target_size: n,
            })
        }
    }
}

impl ExclusionSet {
    pub fn contains(&self, lambda: C, order: usize) -> bool {
        self.removed
            .iter()
            .any(|&(l, k)| (l - lambda).norm() < 1e-9 && k == order)
    }
}

/// A single-component function sampled uniformly over [a, b]: the image
/// of the rescaling operator.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedFunction {
    pub a: f64,
    pub b: f64,
    pub samples: Vec<C>,
}

impl TransformedFunction {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / (self.len() - 1) as f64
    }

    pub fn dot(&self, other: &Self, rule: QuadRule) -> C {
        let vals: Vec<C> = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(&u, &v)| u * v.conj())
            .collect();
        integrate_nodes(&vals, self.h(), rule)
    }

    pub fn norm(&self, rule: QuadRule) -> f64 {
        self.dot(self, rule).re.max(0.0).sqrt()
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            a: self.a,
            b: self.b,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(&u, &v)| u - v)
                .collect(),
        }
    }

    /// Interpolates within one branch of the image: stencils never
    /// cross x = 0, where admissible images are continuous but kinked.
    fn value_at_branch(&self, x: f64, left: bool) -> C {
        let n = self.len();
        let h = self.h();
        let zero_idx = -self.a / h;
        let (lo, hi) = if left {
            (0usize, (zero_idx.floor() as usize).clamp(3, n - 1))
        } else {
            ((zero_idx.ceil() as usize).min(n - 4), n - 1)
        };
        let slice = &self.samples[lo..=hi];
        let x_lo = self.a + lo as f64 * h;
        let x_hi = self.a + hi as f64 * h;
        interp_cubic(slice, (x - x_lo) / (x_hi - x_lo))
    }
}

/// The rescaling operator: maps a two-component function on [0,1] to
/// one component on [a,b] via
/// `x in (a,0) -> y1(x/a)/C12`, `x in (0,b) -> -y2(x/b)/C11`
/// (left branch at x = 0), resampled by cubic interpolation.
pub fn apply_rescaling(
    sbc: &SeparatedBc,
    spec: &SystemSpec,
    y: &GridFunction2,
) -> Result<TransformedFunction> {
    let c11 = sbc.leading[0];
    let c12 = sbc.leading[1];
    if c11.norm() == 0.0 || c12.norm() == 0.0 {
        return Err(Error::InvalidBoundary(
            "rescaling needs nonzero leading coefficients C11, C12".into(),
        ));
    }
    let n = y.len();
    let (a, b) = (spec.a, spec.b);
    let h = (b - a) / (n - 1) as f64;
    let samples = (0..n)
        .map(|j| {
            let x = a + j as f64 * h;
            if x <= 0.0 {
                interp_cubic(&y.c1, x / a) / c12
            } else {
                -interp_cubic(&y.c2, x / b) / c11
            }
        })
        .collect();
    Ok(TransformedFunction { a, b, samples })
}

/// Inverse of [`apply_rescaling`] up to interpolation error.
pub fn inverse_rescaling(
    sbc: &SeparatedBc,
    t: &TransformedFunction,
    n_out: usize,
) -> GridFunction2 {
    let c11 = sbc.leading[0];
    let c12 = sbc.leading[1];
    let hs = 1.0 / (n_out - 1) as f64;
    let mut out = GridFunction2::zeros(n_out);
    for j in 0..n_out {
        let s = j as f64 * hs;
        out.c1[j] = t.value_at_branch(t.a * s, true) * c12;
        out.c2[j] = -t.value_at_branch(t.b * s, false) * c11;
    }
    out
}

/// The n-th reference exponential `exp(i μ_n x)` on [a,b], with
/// `μ_n = (i ln R + 2πn) / (b - a)`, and its closed-form squared norm
/// `∫_a^b exp(-2 Re(ln R) x / (b - a)) dx`.
pub fn reference_basis(
    sbc: &SeparatedBc,
    spec: &SystemSpec,
    n: i64,
    n_points: usize,
) -> (TransformedFunction, f64) {
    let (a, b) = (spec.a, spec.b);
    let log_r = sbc.leading_ratio().ln();
    let mu = (C::new(0.0, 1.0) * log_r + 2.0 * PI * n as f64) / (b - a);
    let h = (b - a) / (n_points - 1) as f64;
    let samples = (0..n_points)
        .map(|j| (C::new(0.0, 1.0) * mu * (a + j as f64 * h)).exp())
        .collect();
    let kappa = log_r.re / (b - a);
    let norm_sq = if kappa.abs() < 1e-14 {
        b - a
    } else {
        ((-2.0 * kappa * a).exp() - (-2.0 * kappa * b).exp()) / (2.0 * kappa)
    };
    (TransformedFunction { a, b, samples }, norm_sq)
}

/// Canonically-scaled separated eigenfunction
/// `ω(x; λ) = (P12(λ) φ_0 - P11(λ) ψ_0) / λ^{N0}`; the division keeps
/// the leading constants of (C12 e^{iaλx}, -C11 e^{ibλx}) in charge for
/// polynomial rows (skipped near λ = 0, where only one term of the
/// closeness tail lives anyway).
pub fn canonical_eigenfunction(ctx: &CharContext, lambda: C) -> Result<GridFunction2> {
    let sbc = match &ctx.bc {
        BoundaryCondition::Separated(sbc) => sbc,
        _ => {
            return Err(Error::InvalidInput(
                "canonical eigenfunctions need separated conditions".into(),
            ))
        }
    };
    let fs = ctx.fundamental(lambda, 0)?;
    let p11 = poly_jet(&sbc.p11, lambda, 1).value();
    let p12 = poly_jet(&sbc.p12, lambda, 1).value();
    let n = fs.n();
    let mut out = GridFunction2::zeros(n);
    for node in 0..n {
        let p = fs.phi_at(node);
        let s = fs.psi_at(node);
        out.c1[node] = p12 * p[0] - p11 * s[0];
        out.c2[node] = p12 * p[1] - p11 * s[1];
    }
    if sbc.n0 > 0 && lambda.norm() > 0.5 {
        let scale = lambda.powu(sbc.n0 as u32);
        out = out.scale(1.0 / scale);
    }
    Ok(out)
}

/// Transformed canonical eigenfunctions keyed by strip index, aligned
/// for the closeness sums.
pub fn canonical_transformed_family(
    ctx: &CharContext,
    points: &[SpectralPoint],
) -> Result<Vec<(i64, TransformedFunction)>> {
    let sbc = match &ctx.bc {
        BoundaryCondition::Separated(sbc) => sbc,
        _ => {
            return Err(Error::InvalidInput(
                "transformed family needs separated conditions".into(),
            ))
        }
    };
    let mut out = Vec::with_capacity(points.len());
    for pt in points {
        let n = pt.strip_index.ok_or_else(|| {
            Error::EnumerationMismatch(format!("point {} carries no strip index", pt.lambda))
        })?;
        let omega = canonical_eigenfunction(ctx, pt.lambda)?;
        out.push((n, apply_rescaling(sbc, &ctx.spec, &omega)?));
    }
    out.sort_by_key(|(n, _)| *n);
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct TailTerm {
    pub n: i64,
    /// ‖A ω_n - ω̃_n‖ on [a,b].
    pub term_norm: f64,
    /// |n| · term_norm; bounded under the O(1/n) closeness estimate.
    pub scaled: f64,
}

#[derive(Debug, Clone)]
pub struct TailReport {
    pub per_term: Vec<TailTerm>,
    /// Partial sums S_K = Σ_{|n| <= K} ‖A ω_n - ω̃_n‖².
    pub partial_sums: Vec<(usize, f64)>,
}

/// Quadratic-closeness tails of the transformed system against the
/// reference exponentials. Both families must cover the same strip
/// indices.
pub fn tail_sum(
    transformed: &[(i64, TransformedFunction)],
    refs: &[(i64, TransformedFunction)],
    rule: QuadRule,
) -> Result<TailReport> {
    if transformed.len() != refs.len() {
        return Err(Error::EnumerationMismatch(format!(
            "{} transformed functions vs {} references",
            transformed.len(),
            refs.len()
        )));
    }
    let mut per_term = Vec::with_capacity(transformed.len());
    for ((n_t, t), (n_r, r)) in transformed.iter().zip(refs) {
        if n_t != n_r {
            return Err(Error::EnumerationMismatch(format!(
                "index {n_t} paired with reference {n_r}"
            )));
        }
        let term_norm = t.sub(r).norm(rule);
        per_term.push(TailTerm {
            n: *n_t,
            term_norm,
            scaled: (*n_t).abs() as f64 * term_norm,
        });
    }
    per_term.sort_by_key(|t| (t.n.abs(), t.n));
    let k_max = per_term.iter().map(|t| t.n.unsigned_abs() as usize).max();
    let mut partial_sums = Vec::new();
    if let Some(k_max) = k_max {
        for k in 0..=k_max {
            let s: f64 = per_term
                .iter()
                .filter(|t| t.n.unsigned_abs() as usize <= k)
                .map(|t| t.term_norm * t.term_norm)
                .sum();
            partial_sums.push((k, s));
        }
    }
    Ok(TailReport {
        per_term,
        partial_sums,
    })
}

/// Inner-product abstraction over the two sampled-function kinds.
pub trait L2Inner {
    fn inner(&self, other: &Self, rule: QuadRule) -> C;
}

impl L2Inner for GridFunction2 {
    fn inner(&self, other: &Self, rule: QuadRule) -> C {
        self.dot(other, rule)
    }
}

impl L2Inner for TransformedFunction {
    fn inner(&self, other: &Self, rule: QuadRule) -> C {
        self.dot(other, rule)
    }
}

/// Condition number of the Gram matrix of a (normalized) system by a
/// symmetric eigen-solve on the real embedding of the Hermitian Gram.
/// Condition numbers above 1e12 are reported as rank deficiency.
pub fn gram_condition<T: L2Inner>(items: &[T], rule: QuadRule) -> Result<f64> {
    let m = items.len();
    if m == 0 {
        return Err(Error::InvalidInput("empty Gram system".into()));
    }
    let mut gram = nalgebra::DMatrix::<C>::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v = items[i].inner(&items[j], rule);
            gram[(i, j)] = v;
            gram[(j, i)] = v.conj();
        }
    }
    // real symmetric embedding [[Re, -Im], [Im, Re]] shares the
    // (doubled) spectrum of the Hermitian Gram
    let mut embed = nalgebra::DMatrix::<f64>::zeros(2 * m, 2 * m);
    for i in 0..m {
        for j in 0..m {
            let v = gram[(i, j)];
            embed[(i, j)] = v.re;
            embed[(i, j + m)] = -v.im;
            embed[(i + m, j)] = v.im;
            embed[(i + m, j + m)] = v.re;
        }
    }
    let eigen = embed.symmetric_eigen();
    let max = eigen.eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
    let min = eigen.eigenvalues.iter().cloned().fold(f64::MAX, f64::min);
    if max.is_nan() || max <= 0.0 {
        return Err(Error::RankDeficientGram(f64::INFINITY));
    }
    let cond = if min <= 0.0 { f64::INFINITY } else { max / min };
    if cond > 1e12 {
        return Err(Error::RankDeficientGram(cond));
    }
    Ok(cond)
}

#[derive(Debug, Clone)]
pub struct CompletenessEntry {
    /// ‖f - P_K f‖.
    pub residual_norm: f64,
    /// ‖f - P_K f‖² / ‖f‖²: relative energy deficit.
    pub relative_energy: f64,
}

#[derive(Debug, Clone)]
pub struct CompletenessRow {
    pub k: usize,
    /// Number of family members actually used (2K+1 capped).
    pub used: usize,
    pub entries: Vec<CompletenessEntry>,
}

/// Least-squares projection residuals of each test function onto the
/// span of the first `2K+1` family members, by normal equations with a
/// Tikhonov floor of 1e-12, tabulated over K.
pub fn completeness_residual(
    family: &[GridFunction2],
    tests: &[GridFunction2],
    ks: &[usize],
    rule: QuadRule,
) -> Vec<CompletenessRow> {
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let used = (2 * k + 1).min(family.len());
        let members = &family[..used];
        let mut gram = nalgebra::DMatrix::<C>::zeros(used, used);
        for i in 0..used {
            for j in 0..used {
                gram[(i, j)] = members[j].inner(&members[i], rule);
            }
            gram[(i, i)] += C::new(1e-12, 0.0);
        }
        let lu = gram.lu();
        let mut entries = Vec::with_capacity(tests.len());
        for f in tests {
            let beta = nalgebra::DVector::<C>::from_iterator(
                used,
                members.iter().map(|u| f.inner(u, rule)),
            );
            let coeffs = lu.solve(&beta).unwrap_or_else(|| {
                nalgebra::DVector::<C>::zeros(used)
            });
            let mut residual = f.clone();
            for (u, c) in members.iter().zip(coeffs.iter()) {
                residual.add_scaled(u, -*c);
            }
            let rn = residual.norm(rule);
            let fn2 = f.dot(f, rule).re.max(f64::MIN_POSITIVE);
            entries.push(CompletenessEntry {
                residual_norm: rn,
                relative_energy: rn * rn / fn2,
            });
        }
        rows.push(CompletenessRow {
            k,
            used,
            entries,
        });
    }
    rows
}

/// Default completeness test set: polynomial directions and a step.
pub fn default_test_set(n: usize) -> Vec<GridFunction2> {
    let zero = |_: f64| C::new(0.0, 0.0);
    vec![
        GridFunction2::from_fns(n, |_| C::new(1.0, 0.0), zero),
        GridFunction2::from_fns(n, zero, |_| C::new(1.0, 0.0)),
        GridFunction2::from_fns(n, |x| C::new(x, 0.0), zero),
        GridFunction2::from_fns(n, zero, |x| C::new(x, 0.0)),
        GridFunction2::from_fns(n, |x| C::new(if x < 0.5 { 1.0 } else { 0.0 }, 0.0), zero),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::GridConfig;
    use crate::spectrum::{locate_spectrum, Region};

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }
    fn grid(n: usize) -> GridConfig {
        GridConfig::with_points(n).unwrap()
    }
    fn point(lambda: C, mult: usize, strip: i64) -> SpectralPoint {
        SpectralPoint {
            lambda,
            multiplicity: mult,
            strip_index: Some(strip),
            residual: 0.0,
            model_root: None,
        }
    }

    #[test]
    fn exclusion_empty_and_simple() {
        let pts = [
            point(c(0.0, 0.0), 1, 0),
            point(c(PI, 0.0), 1, 1),
            point(c(-PI, 0.0), 1, -1),
        ];
        let empty = select_exclusion(&pts, 0, &ExclusionStrategy::LowestModulus).unwrap();
        assert!(empty.removed.is_empty());
        let one = select_exclusion(&pts, 1, &ExclusionStrategy::LowestModulus).unwrap();
        assert_eq!(one.removed, vec![(c(0.0, 0.0), 0)]);
    }

    #[test]
    fn exclusion_trims_chains_top_down() {
        let pts = [point(c(2.0 * PI, 0.0), 4, 2), point(c(4.0 * PI, 0.0), 4, 4)];
        let set = select_exclusion(&pts, 2, &ExclusionStrategy::LowestModulus).unwrap();
        assert_eq!(set.removed, vec![(c(2.0 * PI, 0.0), 3), (c(2.0 * PI, 0.0), 2)]);
    }

    #[test]
    fn exclusion_rejects_oversize_and_open_sets() {
        let pts = [point(c(PI, 0.0), 1, 1)];
        assert!(matches!(
            select_exclusion(&pts, 2, &ExclusionStrategy::LowestModulus),
            Err(Error::ExclusionSize { .. })
        ));
        let pts4 = [point(c(PI, 0.0), 4, 1)];
        // order 1 without orders 2, 3 violates closure
        let open = ExclusionStrategy::Explicit(vec![(c(PI, 0.0), 1)]);
        assert!(select_exclusion(&pts4, 1, &open).is_err());
        let closed = ExclusionStrategy::Explicit(vec![(c(PI, 0.0), 3)]);
        assert!(select_exclusion(&pts4, 1, &closed).is_ok());
    }

    #[test]
    fn rescaling_of_constant_pair() {
        let (spec, sbc) = fixtures::free_separated_all_ones();
        let y = GridFunction2::from_fns(65, |_| c(1.0, 0.0), |_| c(1.0, 0.0));
        let t = apply_rescaling(&sbc, &spec, &y).unwrap();
        // value 1 on (-1, 0), -1 on (0, 1)
        assert!((t.samples[3] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((t.samples[60] + c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn rescaling_round_trip() {
        // y is admissible for the operator (row-1 continuity at the
        // joint: y1(0) + y2(0) = 0 for the all-ones conditions)
        let (spec, sbc) = fixtures::free_separated_all_ones();
        let y = GridFunction2::from_fns(
            129,
            |x| (c(0.0, 2.0 * x)).exp() * (1.0 + x),
            |x| -((c(0.0, -1.5 * x)).exp()) * (1.0 - 0.3 * x),
        );
        let t = apply_rescaling(&sbc, &spec, &y).unwrap();
        let back = inverse_rescaling(&sbc, &t, 129);
        let err = back.sub(&y).sup_norm();
        assert!(err < 1e-6, "round-trip error {err:.3e}");
    }

    #[test]
    fn rescaled_free_eigenfunction_is_reference_exponential() {
        let (spec, sbc) = fixtures::free_separated_all_ones();
        let n = 3i64;
        let y = GridFunction2::from_fns(
            129,
            |x| (c(0.0, -PI * n as f64 * x)).exp(),
            |x| -((c(0.0, PI * n as f64 * x)).exp()),
        );
        let t = apply_rescaling(&sbc, &spec, &y).unwrap();
        let (reference, norm_sq) = reference_basis(&sbc, &spec, n, 129);
        assert!((norm_sq - 2.0).abs() < 1e-12);
        let diff = t.sub(&reference).norm(QuadRule::Simpson);
        assert!(diff < 1e-9, "difference {diff:.3e}");
    }

    #[test]
    fn reference_norms_closed_form() {
        let spec = SystemSpec::free(-1.0, 1.0);
        let (_, n0) = reference_basis(&SeparatedBc::all_ones(), &spec, 0, 65);
        assert!((n0 - 2.0).abs() < 1e-12);
        // leading ratio 2: ∫_{-1}^{1} e^{-ln2 x} dx = 3 / (2 ln 2)
        let sbc2 = SeparatedBc::constants(c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0))
            .unwrap();
        let (_, n2) = reference_basis(&sbc2, &spec, 1, 65);
        assert!((n2 - 3.0 / (2.0 * 2.0f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn tail_terms_vanish_for_free_system() {
        let (spec, sbc) = fixtures::free_separated_all_ones();
        let ctx = CharContext::new(
            spec.clone(),
            BoundaryCondition::Separated(sbc.clone()),
            grid(129),
        )
        .unwrap();
        let result = locate_spectrum(
            &ctx,
            &Region::StripRange {
                n_lo: -3,
                n_hi: 3,
                im_band: None,
            },
        )
        .unwrap();
        let family = canonical_transformed_family(&ctx, &result.points).unwrap();
        let refs: Vec<(i64, TransformedFunction)> = family
            .iter()
            .map(|(n, _)| (*n, reference_basis(&sbc, &spec, *n, 129).0))
            .collect();
        let report = tail_sum(&family, &refs, QuadRule::Simpson).unwrap();
        for term in &report.per_term {
            assert!(
                term.term_norm < 1e-7,
                "term {} = {:.3e}",
                term.n,
                term.term_norm
            );
        }
        let (_, s_last) = *report.partial_sums.last().unwrap();
        assert!(s_last < 1e-12);
    }

    #[test]
    fn tail_term_zero_against_itself_and_mismatch_error() {
        let (spec, sbc) = fixtures::free_separated_all_ones();
        let (r1, _) = reference_basis(&sbc, &spec, 1, 65);
        let report = tail_sum(
            &[(1, r1.clone())],
            &[(1, r1.clone())],
            QuadRule::Simpson,
        )
        .unwrap();
        assert!(report.per_term[0].term_norm == 0.0);
        assert!(matches!(
            tail_sum(&[(1, r1.clone())], &[(2, r1)], QuadRule::Simpson),
            Err(Error::EnumerationMismatch(_))
        ));
    }

    #[test]
    fn gram_of_orthonormal_exponentials_is_identity() {
        let (spec, sbc) = fixtures::free_separated_all_ones();
        let items: Vec<TransformedFunction> = (-3i64..=3)
            .map(|n| {
                let (f, norm_sq) = reference_basis(&sbc, &spec, n, 129);
                TransformedFunction {
                    a: f.a,
                    b: f.b,
                    samples: f
                        .samples
                        .iter()
                        .map(|&v| v / norm_sq.sqrt())
                        .collect(),
                }
            })
            .collect();
        let cond = gram_condition(&items, QuadRule::Simpson).unwrap();
        assert!((cond - 1.0).abs() < 1e-8, "condition {cond}");
    }

    #[test]
    fn gram_flags_duplicates() {
        let (spec, sbc) = fixtures::free_separated_all_ones();
        let (f, _) = reference_basis(&sbc, &spec, 1, 65);
        let err = gram_condition(&[f.clone(), f], QuadRule::Simpson);
        assert!(matches!(err, Err(Error::RankDeficientGram(_))));
    }

    #[test]
    fn completeness_member_of_span_and_contraction() {
        let (spec, sbc) = fixtures::free_separated_all_ones();
        let ctx = CharContext::new(
            spec.clone(),
            BoundaryCondition::Separated(sbc.clone()),
            grid(129),
        )
        .unwrap();
        let family = eigen_family(&ctx, 4);
        // f = ω̃_3 pulled back through the inverse rescaling
        let (r3, _) = reference_basis(&sbc, &spec, 3, 129);
        let f = inverse_rescaling(&sbc, &r3, 129);
        let rows =
            completeness_residual(&family, std::slice::from_ref(&f), &[1, 3], QuadRule::Simpson);
        assert!(rows[0].entries[0].residual_norm > 0.3);
        assert!(rows[1].entries[0].residual_norm < 1e-5);
        // projection is a contraction even with a single member
        let rows0 = completeness_residual(
            &family[..1],
            std::slice::from_ref(&f),
            &[0],
            QuadRule::Simpson,
        );
        assert!(rows0[0].entries[0].residual_norm <= f.norm(QuadRule::Simpson) + 1e-12);
    }

    #[test]
    fn completeness_residual_decreases_for_constant() {
        let (spec, sbc) = fixtures::free_separated_all_ones();
        let ctx = CharContext::new(
            spec,
            BoundaryCondition::Separated(sbc),
            grid(129),
        )
        .unwrap();
        let family = eigen_family(&ctx, 8);
        let f = GridFunction2::from_fns(129, |_| c(1.0, 0.0), |_| c(0.0, 0.0));
        let rows = completeness_residual(&family, &[f], &[2, 4, 8], QuadRule::Simpson);
        assert!(rows[0].entries[0].residual_norm > rows[1].entries[0].residual_norm);
        assert!(rows[1].entries[0].residual_norm > rows[2].entries[0].residual_norm);
    }

    #[test]
    fn parseval_proxy_for_free_system() {
        // Σ |⟨Af, ω̃_n⟩|² / ‖ω̃_n‖² approaches ‖Af‖² (within 5% at K=30)
        let (spec, sbc) = fixtures::free_separated_all_ones();
        let f = GridFunction2::from_fns(
            513,
            |x| c((PI * x).sin(), 0.0),
            |x| c(x * (1.0 - x), 0.2 * x),
        );
        let af = apply_rescaling(&sbc, &spec, &f).unwrap();
        let total = af.dot(&af, QuadRule::Simpson).re;
        let mut captured = 0.0;
        for n in -30i64..=30 {
            let (w, norm_sq) = reference_basis(&sbc, &spec, n, 513);
            captured += af.dot(&w, QuadRule::Simpson).norm_sqr() / norm_sq;
        }
        let gap = (total - captured).abs() / total;
        assert!(gap < 0.05, "Parseval gap {gap:.3}");
    }

    #[test]
    fn rescaling_preserves_weighted_inner_product() {
        // admissible at the joint so the transformed image is
        // continuous and the quadrature identity holds at full order
        let (spec, sbc) = fixtures::free_separated_all_ones();
        let y = GridFunction2::from_fns(
            257,
            |x| (c(0.0, 3.0 * x)).exp() * (0.5 + x),
            |x| -((c(0.0, 2.0 * x)).exp()) * (0.5 - 0.2 * x),
        );
        let t = apply_rescaling(&sbc, &spec, &y).unwrap();
        let lhs = t.dot(&t, QuadRule::Simpson).re;
        // substitution weights: |a|/|C12|² on the first component,
        // b/|C11|² on the second
        let c1: Vec<C> = y.c1.iter().map(|&v| v * v.conj()).collect();
        let c2: Vec<C> = y.c2.iter().map(|&v| v * v.conj()).collect();
        let i1 = integrate_nodes(&c1, y.h(), QuadRule::Simpson).re;
        let i2 = integrate_nodes(&c2, y.h(), QuadRule::Simpson).re;
        let rhs = spec.a.abs() * i1 + spec.b * i2;
        assert!((lhs - rhs).abs() <= 1e-6 * rhs.abs());
    }

    /// Normalized free eigenfunctions over |n| <= k, ordered by (|n|, n).
    fn eigen_family(ctx: &CharContext, k: i64) -> Vec<GridFunction2> {
        let result = locate_spectrum(
            ctx,
            &Region::StripRange {
                n_lo: -k,
                n_hi: k,
                im_band: None,
            },
        )
        .unwrap();
        let mut pts = result.points.clone();
        pts.sort_by_key(|p| {
            let n = p.strip_index.unwrap();
            (n.abs(), n)
        });
        pts.iter()
            .map(|p| {
                let f = canonical_eigenfunction(ctx, p.lambda).unwrap();
                let norm = f.norm(ctx.grid.quad_rule);
                f.scale(c(1.0 / norm, 0.0))
            })
            .collect()
    }
}
