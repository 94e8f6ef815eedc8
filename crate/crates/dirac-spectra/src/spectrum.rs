//! Eigenvalue location: strip enumeration, argument-principle winding
//! counts on rectangles, recursive isolation, Newton refinement,
//! multiplicities from isolating contours, and verification of the
//! eigenvalue asymptotics.

use crate::cauchy::fmt17;
use crate::charfn::CharContext;
use crate::model::{BoundaryCondition, SeparatedBc, SystemSpec};
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::io::Write;

type C = Complex64;

const CLUSTER_TOL: f64 = 1e-7;
const MIN_RECT_DIAMETER: f64 = 1e-6;
const MAX_CONTOUR_RETRIES: usize = 5;

/// Axis-aligned closed rectangle in the λ plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub re0: f64,
    pub re1: f64,
    pub im0: f64,
    pub im1: f64,
}

impl Rect {
    pub fn new(re0: f64, re1: f64, im0: f64, im1: f64) -> Self {
        assert!(re0 < re1 && im0 < im1, "degenerate rectangle");
        Self { re0, re1, im0, im1 }
    }

    pub fn center(&self) -> C {
        C::new(0.5 * (self.re0 + self.re1), 0.5 * (self.im0 + self.im1))
    }

    pub fn width(&self) -> f64 {
        self.re1 - self.re0
    }

    pub fn height(&self) -> f64 {
        self.im1 - self.im0
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn dilate(&self, factor: f64) -> Self {
        let c = self.center();
        let hw = 0.5 * self.width() * factor;
        let hh = 0.5 * self.height() * factor;
        Self {
            re0: c.re - hw,
            re1: c.re + hw,
            im0: c.im - hh,
            im1: c.im + hh,
        }
    }

    pub fn contains(&self, z: C, margin: f64) -> bool {
        z.re >= self.re0 - margin
            && z.re <= self.re1 + margin
            && z.im >= self.im0 - margin
            && z.im <= self.im1 + margin
    }

    /// Splits along the longer side at the given fraction.
    pub fn split(&self, fraction: f64) -> (Self, Self) {
        if self.width() >= self.height() {
            let mid = self.re0 + fraction * self.width();
            (
                Self::new(self.re0, mid, self.im0, self.im1),
                Self::new(mid, self.re1, self.im0, self.im1),
            )
        } else {
            let mid = self.im0 + fraction * self.height();
            (
                Self::new(self.re0, self.re1, self.im0, mid),
                Self::new(self.re0, self.re1, mid, self.im1),
            )
        }
    }
}

/// A located eigenvalue: a zero of χ with its isolating-contour
/// multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPoint {
    pub lambda: C,
    pub multiplicity: usize,
    pub strip_index: Option<i64>,
    /// |χ(λ)| after refinement.
    pub residual: f64,
    pub model_root: Option<C>,
}

/// Search region: bilateral strip range (separated conditions) or an
/// explicit rectangle.
#[derive(Debug, Clone)]
pub enum Region {
    StripRange {
        n_lo: i64,
        n_hi: i64,
        /// Half-height H of the strips; default `5 + |ln R| / (b - a)`.
        im_band: Option<f64>,
    },
    Rect(Rect),
}

/// Principal logarithm of the two-exponential leading ratio.
pub fn leading_ratio_log(sbc: &SeparatedBc) -> C {
    sbc.leading_ratio().ln()
}

/// Model roots `λ_{n,0} = (i ln R + 2πn) / (b - a)` of the
/// two-exponential leading part of χ, principal branch.
pub fn model_roots(sbc: &SeparatedBc, spec: &SystemSpec, n_range: (i64, i64)) -> Result<Vec<C>> {
    if sbc.leading.iter().any(|c| c.norm() == 0.0) {
        return Err(Error::InvalidBoundary(
            "zero leading coefficient in separated conditions".into(),
        ));
    }
    let (lo, hi) = n_range;
    Ok((lo..=hi).map(|n| model_root(sbc, spec, n)).collect())
}

pub fn model_root(sbc: &SeparatedBc, spec: &SystemSpec, n: i64) -> C {
    let log_r = leading_ratio_log(sbc);
    (C::new(0.0, 1.0) * log_r + 2.0 * PI * n as f64) / (spec.b - spec.a)
}

/// Default strip half-height.
pub fn default_im_band(sbc: &SeparatedBc, spec: &SystemSpec) -> f64 {
    5.0 + leading_ratio_log(sbc).norm() / (spec.b - spec.a)
}

/// The n-th localization strip
/// `(2n-1)π < (b-a) Re λ + Im ln R < (2n+1)π`, cut at `|Im λ| <= H`.
pub fn strip_rect(sbc: &SeparatedBc, spec: &SystemSpec, n: i64, im_band: Option<f64>) -> Rect {
    let h = im_band.unwrap_or_else(|| default_im_band(sbc, spec));
    let shift = leading_ratio_log(sbc).im;
    let denom = spec.b - spec.a;
    Rect::new(
        ((2 * n - 1) as f64 * PI - shift) / denom,
        ((2 * n + 1) as f64 * PI - shift) / denom,
        -h,
        h,
    )
}

/// Strip index of a point under the same parametrization.
pub fn strip_index_of(sbc: &SeparatedBc, spec: &SystemSpec, lambda: C) -> i64 {
    let shift = leading_ratio_log(sbc).im;
    (((spec.b - spec.a) * lambda.re + shift) / (2.0 * PI)).round() as i64
}

enum WindingOutcome {
    Count(i64),
    OnContour,
}

/// Winding number of χ along the rectangle boundary by accumulated
/// argument over sampled points, bisecting any segment whose argument
/// step exceeds π/2. Rectangles with a boundary zero are dilated by 1%
/// and retried (up to 5 times).
pub fn count_zeros_rect<F>(chi: &F, rect: Rect, samples: usize) -> Result<usize>
where
    F: Fn(C) -> Result<C>,
{
    let mut current = rect;
    for _ in 0..=MAX_CONTOUR_RETRIES {
        match winding_attempt(chi, current, samples)? {
            WindingOutcome::Count(w) => {
                if w < 0 {
                    // analytic functions wind nonnegatively; treat as a
                    // sampling artifact and retry dilated
                    current = current.dilate(1.01);
                    continue;
                }
                return Ok(w as usize);
            }
            WindingOutcome::OnContour => {
                current = current.dilate(1.01);
            }
        }
    }
    Err(Error::ZeroOnContour(MAX_CONTOUR_RETRIES))
}

fn winding_attempt<F>(chi: &F, rect: Rect, samples: usize) -> Result<WindingOutcome>
where
    F: Fn(C) -> Result<C>,
{
    let total = samples.max(16);
    let perimeter = 2.0 * (rect.width() + rect.height());
    let corners = [
        C::new(rect.re0, rect.im0),
        C::new(rect.re1, rect.im0),
        C::new(rect.re1, rect.im1),
        C::new(rect.re0, rect.im1),
    ];
    let mut points = Vec::with_capacity(total + 4);
    for e in 0..4 {
        let from = corners[e];
        let to = corners[(e + 1) % 4];
        let len = (to - from).norm();
        let count = ((total as f64 * len / perimeter).ceil() as usize).max(4);
        for k in 0..count {
            points.push(from + (to - from) * (k as f64 / count as f64));
        }
    }
    points.push(corners[0]);

    let values: Vec<C> = points
        .iter()
        .map(|&z| chi(z))
        .collect::<Result<Vec<_>>>()?;
    let vmax = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if vmax == 0.0 {
        return Ok(WindingOutcome::OnContour);
    }
    let floor = 1e-12 * vmax;
    if values.iter().any(|v| v.norm() < floor) {
        return Ok(WindingOutcome::OnContour);
    }

    let check_len = perimeter / (4.0 * total as f64);
    let mut total_arg = 0.0;
    for k in 0..points.len() - 1 {
        match segment_arg(
            chi,
            points[k],
            values[k],
            points[k + 1],
            values[k + 1],
            floor,
            check_len,
            0,
        )? {
            Some(d) => total_arg += d,
            None => return Ok(WindingOutcome::OnContour),
        }
    }
    let w = total_arg / (2.0 * PI);
    if (w - w.round()).abs() > 0.25 {
        return Ok(WindingOutcome::OnContour);
    }
    Ok(WindingOutcome::Count(w.round() as i64))
}

/// Argument change along one boundary segment. A segment is accepted
/// only when its endpoint argument step is below π/2 and no magnitude
/// dip hides a close zero: a zero passing near the segment can swing
/// the argument by a full turn while the endpoint ratio stays tame, so
/// segments longer than `check_len` also probe their midpoint and
/// bisect when it dips below the endpoint magnitudes.
#[allow(clippy::too_many_arguments)]
fn segment_arg<F>(
    chi: &F,
    p0: C,
    v0: C,
    p1: C,
    v1: C,
    floor: f64,
    check_len: f64,
    depth: usize,
) -> Result<Option<f64>>
where
    F: Fn(C) -> Result<C>,
{
    let d = (v1 / v0).arg();
    let small_arg = d.abs() <= std::f64::consts::FRAC_PI_2;
    if small_arg && (p1 - p0).norm() <= check_len {
        return Ok(Some(d));
    }
    if depth >= 48 {
        return Ok(None);
    }
    let mid = (p0 + p1) * 0.5;
    let vm = chi(mid)?;
    if vm.norm() < floor {
        return Ok(None);
    }
    if small_arg && vm.norm() >= 0.6 * v0.norm().min(v1.norm()) {
        let dl = (vm / v0).arg();
        let dr = (v1 / vm).arg();
        if dl.abs() <= std::f64::consts::FRAC_PI_2 && dr.abs() <= std::f64::consts::FRAC_PI_2 {
            return Ok(Some(dl + dr));
        }
    }
    let left = segment_arg(chi, p0, v0, mid, vm, floor, check_len, depth + 1)?;
    let right = segment_arg(chi, mid, vm, p1, v1, floor, check_len, depth + 1)?;
    Ok(match (left, right) {
        (Some(a), Some(b)) => Some(a + b),
        _ => None,
    })
}

struct NewtonOutcome {
    lambda: C,
    converged: bool,
}

fn newton_refine<F>(chi: &F, start: C, tol: f64) -> Result<NewtonOutcome>
where
    F: Fn(C) -> Result<C>,
{
    let mut lambda = start;
    let mut value = chi(lambda)?;
    let mut prev: Option<(C, C)> = None;
    let mut converged = false;
    for _ in 0..50 {
        let scale = lambda.norm().max(1.0);
        let h = 1e-6 * scale;
        let deriv = (chi(lambda + C::new(h, 0.0))? - chi(lambda - C::new(h, 0.0))?)
            / C::new(2.0 * h, 0.0);
        let step = if deriv.norm() > 1e-300 {
            value / deriv
        } else {
            // secant fallback on derivative underflow
            match prev {
                Some((pl, pv)) if (value - pv).norm() > 1e-300 => {
                    value * (lambda - pl) / (value - pv)
                }
                _ => break,
            }
        };
        prev = Some((lambda, value));
        lambda -= step;
        value = chi(lambda)?;
        let resid_ok = value.norm() <= tol * (1.0 + deriv.norm());
        // at a simple root the next step is ~ step², so stopping at
        // 1e-6 leaves ~1e-12 error; the looser threshold lets the
        // linearly-converging multiple-root case finish within the
        // iteration cap (the jet polish restores its accuracy later)
        if resid_ok && step.norm() <= 1e-6 * scale {
            converged = true;
            break;
        }
        if step.norm() <= 1e-13 * scale {
            converged = resid_ok;
            break;
        }
    }
    Ok(NewtonOutcome { lambda, converged })
}

/// Output of [`locate_spectrum`]: points sorted by (Re λ, Im λ), plus
/// non-fatal per-rectangle failures.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub points: Vec<SpectralPoint>,
    pub anomalies: Vec<String>,
}

/// Locates the zeros of χ in the region by recursive rectangle
/// subdivision (winding count ≤ 1 or diameter < 1e-6), Newton
/// refinement, clustering, and isolating-contour multiplicities.
/// Strip jobs run in parallel; the merged output is deterministic.
pub fn locate_spectrum(ctx: &CharContext, region: &Region) -> Result<SpectrumResult> {
    let samples = ctx.grid.contour_samples;
    let tol = ctx.grid.newton_tol;
    let chi = |z: C| ctx.chi(z);

    let jobs: Vec<(Option<i64>, Rect)> = match region {
        Region::Rect(r) => vec![(None, *r)],
        Region::StripRange { n_lo, n_hi, im_band } => {
            let sbc = match &ctx.bc {
                BoundaryCondition::Separated(sbc) => sbc,
                _ => {
                    return Err(Error::InvalidInput(
                        "strip enumeration needs separated boundary conditions".into(),
                    ))
                }
            };
            if n_lo > n_hi {
                return Err(Error::InvalidInput("empty strip range".into()));
            }
            (*n_lo..=*n_hi)
                .map(|n| (Some(n), strip_rect(sbc, &ctx.spec, n, *im_band)))
                .collect()
        }
    };

    let outcomes: Vec<(Vec<C>, Vec<String>)> = jobs
        .par_iter()
        .map(|(tag, rect)| {
            let mut found = Vec::new();
            let mut anomalies = Vec::new();
            match count_zeros_rect(&chi, *rect, samples) {
                Ok(0) => {}
                Ok(count) => {
                    isolate(&chi, *rect, count, samples, tol, &mut found, &mut anomalies)
                }
                Err(e) => anomalies.push(format!(
                    "strip {tag:?} [{:.4},{:.4}]x[{:.4},{:.4}]: {e}",
                    rect.re0, rect.re1, rect.im0, rect.im1
                )),
            }
            (found, anomalies)
        })
        .collect();

    let mut candidates: Vec<C> = Vec::new();
    let mut anomalies: Vec<String> = Vec::new();
    for (found, anoms) in outcomes {
        candidates.extend(found);
        anomalies.extend(anoms);
    }
    candidates.sort_by(|u, v| (u.re, u.im).partial_cmp(&(v.re, v.im)).unwrap());
    let merged = crate::model::cluster_points(&candidates, CLUSTER_TOL);

    let mut points = Vec::new();
    for (k, &candidate) in merged.iter().enumerate() {
        let mut lambda = candidate;
        let nearest = merged
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != k)
            .map(|(_, &o)| (o - lambda).norm())
            .fold(f64::INFINITY, f64::min);
        // keep the contour outside the noise disk of a possible
        // multiple zero (|χ| ~ ε^m meets the evaluation floor there)
        let radius = (0.45 * nearest).min(0.05).max(1e-3f64.min(0.45 * nearest));
        if 0.45 * nearest < 1e-3 {
            anomalies.push(format!(
                "isolating contour at {lambda} squeezed to radius {radius:.2e} by a neighbor"
            ));
        }
        let iso = Rect::new(
            lambda.re - radius,
            lambda.re + radius,
            lambda.im - radius,
            lambda.im + radius,
        );
        let multiplicity = match count_zeros_rect(&chi, iso, samples) {
            Ok(m) if m > 0 => m,
            Ok(_) => {
                anomalies.push(format!("refined point {lambda} lost its isolating contour"));
                continue;
            }
            Err(e) => {
                anomalies.push(format!("multiplicity contour failed at {lambda}: {e}"));
                1
            }
        };
        // a multiple zero annihilates χ^(k) for k < m, so the
        // (m-1)-th jet derivative has a simple zero there: polishing
        // against it recovers the location accuracy that plain values
        // cannot give near an m-fold zero
        if multiplicity > 1 && multiplicity <= crate::MAX_LAMBDA_DERIV {
            if let Some(polished) = polish_multiple(ctx, lambda, multiplicity, radius) {
                lambda = polished;
            }
        }
        let residual = chi(lambda)?.norm();
        let (strip_index, model) = match &ctx.bc {
            BoundaryCondition::Separated(sbc) => {
                let n = strip_index_of(sbc, &ctx.spec, lambda);
                (Some(n), Some(model_root(sbc, &ctx.spec, n)))
            }
            _ => (None, None),
        };
        points.push(SpectralPoint {
            lambda,
            multiplicity,
            strip_index,
            residual,
            model_root: model,
        });
    }
    points.sort_by(|u, v| {
        (u.lambda.re, u.lambda.im)
            .partial_cmp(&(v.lambda.re, v.lambda.im))
            .unwrap()
    });
    Ok(SpectrumResult { points, anomalies })
}

/// Newton on the (m-1)-th λ-derivative of χ from the analytic jet
/// chain; returns the polished location when it stays within the
/// isolating radius.
fn polish_multiple(ctx: &CharContext, start: C, m: usize, radius: f64) -> Option<C> {
    let mut lambda = start;
    for _ in 0..12 {
        let jet = ctx.chi_jet(lambda, m + 1).ok()?;
        let num = jet.c[m - 1];
        let den = jet.c[m] * m as f64;
        if den.norm() < 1e-300 {
            return None;
        }
        let step = num / den;
        lambda -= step;
        if (lambda - start).norm() > radius {
            return None;
        }
        if step.norm() <= 1e-12 * lambda.norm().max(1.0) {
            break;
        }
    }
    Some(lambda)
}

fn isolate<F>(
    chi: &F,
    rect: Rect,
    count: usize,
    samples: usize,
    tol: f64,
    found: &mut Vec<C>,
    anomalies: &mut Vec<String>,
) where
    F: Fn(C) -> Result<C>,
{
    if count == 0 {
        return;
    }
    let tiny = rect.diameter() < MIN_RECT_DIAMETER;
    match newton_refine(chi, rect.center(), tol) {
        Ok(out) if out.converged && rect.contains(out.lambda, 0.05 * rect.diameter() + 1e-9) => {
            if count == 1 {
                found.push(out.lambda);
                return;
            }
            // multiple zeros: accept the refined point only when a
            // small healthy contour around it already carries the
            // whole count (a coinciding multiple zero). Subdividing
            // further would push contours into the region where
            // |χ| ~ ε^m falls below the evaluation noise floor.
            let radius = 1.5e-3 * out.lambda.norm().max(1.0);
            let enclosure = Rect::new(
                out.lambda.re - radius,
                out.lambda.re + radius,
                out.lambda.im - radius,
                out.lambda.im + radius,
            );
            if let Ok(enclosed) = count_zeros_rect(chi, enclosure, samples) {
                if enclosed == count {
                    found.push(out.lambda);
                    return;
                }
            }
        }
        Ok(out) if tiny => {
            // sub-resolution rectangle: accept the best candidate
            found.push(out.lambda);
            return;
        }
        Ok(_) => {}
        Err(e) => {
            anomalies.push(format!("refinement failed near {}: {e}", rect.center()));
            if tiny {
                found.push(rect.center());
                return;
            }
        }
    }
    if tiny {
        found.push(rect.center());
        return;
    }
    // split with child-count verification, nudging the cut if a zero
    // sits on the dividing line
    for fraction in [0.5, 0.47, 0.53, 0.44, 0.56] {
        let (left, right) = rect.split(fraction);
        let cl = match count_zeros_rect(chi, left, samples) {
            Ok(c) => c,
            Err(_) => continue,
        };
        let cr = match count_zeros_rect(chi, right, samples) {
            Ok(c) => c,
            Err(_) => continue,
        };
        if cl + cr != count {
            continue;
        }
        isolate(chi, left, cl, samples, tol, found, anomalies);
        isolate(chi, right, cr, samples, tol, found, anomalies);
        return;
    }
    anomalies.push(format!(
        "could not partition rectangle around {} holding {count} zeros",
        rect.center()
    ));
}

/// Row of the asymptotics report.
#[derive(Debug, Clone)]
pub struct AsymptoticRow {
    pub n: i64,
    pub lambda: C,
    pub model_root: C,
    /// `e_n = |n| |λ_n - λ_{n,0}|`.
    pub scaled_error: f64,
}

#[derive(Debug, Clone)]
pub struct AsymptoticsReport {
    pub rows: Vec<AsymptoticRow>,
    pub max_scaled_error: f64,
    /// Max of the scaled errors over the upper half of |n| does not
    /// exceed the max over the lower half.
    pub non_increasing_trend: bool,
    pub strip_counts: Vec<(i64, usize)>,
    /// Strips whose winding count differs from 1.
    pub anomalous_strips: Vec<i64>,
}

/// Compares located eigenvalues with the model roots and counts roots
/// per strip over the range spanned by the points.
pub fn verify_asymptotics(ctx: &CharContext, points: &[SpectralPoint]) -> Result<AsymptoticsReport> {
    let sbc = match &ctx.bc {
        BoundaryCondition::Separated(sbc) => sbc,
        _ => {
            return Err(Error::InvalidInput(
                "asymptotics verification needs separated boundary conditions".into(),
            ))
        }
    };
    let mut rows = Vec::new();
    for pt in points {
        let n = match pt.strip_index {
            Some(n) => n,
            None => continue,
        };
        let model = model_root(sbc, &ctx.spec, n);
        rows.push(AsymptoticRow {
            n,
            lambda: pt.lambda,
            model_root: model,
            scaled_error: (n.abs() as f64) * (pt.lambda - model).norm(),
        });
    }
    rows.sort_by_key(|r| (r.n.abs(), r.n));
    let max_scaled_error = rows.iter().map(|r| r.scaled_error).fold(0.0, f64::max);

    // per-|n| trend: compare the upper half of the range to the lower
    let abs_ns: Vec<i64> = {
        let mut v: Vec<i64> = rows.iter().map(|r| r.n.abs()).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let non_increasing_trend = if abs_ns.len() >= 4 {
        let split = abs_ns[abs_ns.len() / 2];
        let lower = rows
            .iter()
            .filter(|r| r.n.abs() < split)
            .map(|r| r.scaled_error)
            .fold(0.0, f64::max);
        let upper = rows
            .iter()
            .filter(|r| r.n.abs() >= split)
            .map(|r| r.scaled_error)
            .fold(0.0, f64::max);
        upper <= lower + 1e-12
    } else {
        true
    };

    let chi = |z: C| ctx.chi(z);
    let n_lo = points.iter().filter_map(|p| p.strip_index).min();
    let n_hi = points.iter().filter_map(|p| p.strip_index).max();
    let mut strip_counts = Vec::new();
    let mut anomalous_strips = Vec::new();
    if let (Some(lo), Some(hi)) = (n_lo, n_hi) {
        let counts: Vec<(i64, usize)> = (lo..=hi)
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&n| {
                let rect = strip_rect(sbc, &ctx.spec, n, None);
                let c = count_zeros_rect(&chi, rect, ctx.grid.contour_samples).unwrap_or(usize::MAX);
                (n, c)
            })
            .collect();
        for (n, c) in counts {
            if c != 1 {
                anomalous_strips.push(n);
            }
            strip_counts.push((n, c));
        }
    }
    Ok(AsymptoticsReport {
        rows,
        max_scaled_error,
        non_increasing_trend,
        strip_counts,
        anomalous_strips,
    })
}

/// Spectrum CSV export: n, Re λ, Im λ, multiplicity, residual,
/// Re λ0, Im λ0 (index and model-root columns are empty for
/// non-separated conditions).
pub fn write_spectrum_csv(points: &[SpectralPoint], w: &mut impl Write) -> std::io::Result<()> {
    writeln!(w, "n,re_lambda,im_lambda,multiplicity,residual,re_model,im_model")?;
    for pt in points {
        let n = pt.strip_index.map(|n| n.to_string()).unwrap_or_default();
        let (rm, im) = pt
            .model_root
            .map(|m| (fmt17(m.re), fmt17(m.im)))
            .unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            n,
            fmt17(pt.lambda.re),
            fmt17(pt.lambda.im),
            pt.multiplicity,
            fmt17(pt.residual),
            rm,
            im
        )?;
    }
    Ok(())
}
