//! JSON run configuration: schema types, semantic validation, and
//! conversion into the solver's domain types.

use anyhow::{anyhow, bail, Context, Result};
use dirac_spectra::model::{
    BoundaryCondition, ComplexPolynomial, GridConfig, KernelFunction, LinearBc, QuadRule,
    QuadraticBc, ScalarFunction, SeparableTerm, SeparatedBc, SystemSpec, Term, TermKind,
};
use dirac_spectra::spectrum::{Rect, Region};
use num_complex::Complex64;
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub system: SystemConfig,
    pub boundary: BoundaryConfig,
    #[serde(default)]
    pub grid: GridConfigJson,
    pub tasks: Vec<Task>,
    #[serde(default)]
    pub spectrum: Option<SpectrumConfig>,
    #[serde(default)]
    pub riesz: Option<RieszConfig>,
    #[serde(default = "default_output_dir")]
    pub output_dir: String,
}

fn default_output_dir() -> String {
    "out".to_string()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    CheckConditions,
    Spectrum,
    Eigenfunctions,
    ValidateAsymptotics,
    RieszReport,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub a: f64,
    pub b: f64,
    #[serde(default)]
    pub q1: Vec<TermConfig>,
    #[serde(default)]
    pub q2: Vec<TermConfig>,
    #[serde(default)]
    pub kernel: Option<KernelConfig>,
}

/// One closed-form term. `monomial` and `trig` mirror the solver's
/// term kinds; `sin` and `cos` are sugar that expands to conjugate
/// `trig` pairs.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TermConfig {
    Monomial { coeff: [f64; 2], power: f64 },
    Trig { coeff: [f64; 2], freq: f64 },
    Sin { amp: f64, freq: f64 },
    Cos { amp: f64, freq: f64 },
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    #[serde(default)]
    pub m11: Vec<SeparableConfig>,
    #[serde(default)]
    pub m12: Vec<SeparableConfig>,
    #[serde(default)]
    pub m21: Vec<SeparableConfig>,
    #[serde(default)]
    pub m22: Vec<SeparableConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeparableConfig {
    pub f: Vec<TermConfig>,
    pub g: Vec<TermConfig>,
}

/// Polynomials are ascending lists of [re, im] coefficient pairs.
pub type PolyConfig = Vec<[f64; 2]>;

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
#[allow(clippy::large_enum_variant)]
pub enum BoundaryConfig {
    Linear {
        rows: [[PolyConfig; 4]; 2],
    },
    Quadratic {
        rows: [[PolyConfig; 10]; 2],
    },
    Separated {
        p11: PolyConfig,
        p12: PolyConfig,
        p21: PolyConfig,
        p22: PolyConfig,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfigJson {
    #[serde(default = "default_n_points")]
    pub n_points: usize,
    #[serde(default = "default_quad_rule")]
    pub quad_rule: String,
    #[serde(default = "default_newton_tol")]
    pub newton_tol: f64,
    #[serde(default = "default_contour_samples")]
    pub contour_samples: usize,
}

fn default_n_points() -> usize {
    513
}
fn default_quad_rule() -> String {
    "simpson".to_string()
}
fn default_newton_tol() -> f64 {
    1e-10
}
fn default_contour_samples() -> usize {
    64
}

impl Default for GridConfigJson {
    fn default() -> Self {
        Self {
            n_points: default_n_points(),
            quad_rule: default_quad_rule(),
            newton_tol: default_newton_tol(),
            contour_samples: default_contour_samples(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    #[serde(default)]
    pub n_range: Option<[i64; 2]>,
    #[serde(default)]
    pub rect: Option<RectConfig>,
    #[serde(default)]
    pub im_band: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RectConfig {
    pub re: [f64; 2],
    pub im: [f64; 2],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RieszConfig {
    #[serde(default = "default_k_values")]
    pub k_values: Vec<usize>,
    /// Exclusion-set size (closed chains removed lowest-modulus first).
    #[serde(default)]
    pub exclusion: Option<usize>,
}

fn default_k_values() -> Vec<usize> {
    vec![5, 10, 20]
}

impl Default for RieszConfig {
    fn default() -> Self {
        Self {
            k_values: default_k_values(),
            exclusion: None,
        }
    }
}

pub struct Resolved {
    pub spec: SystemSpec,
    pub bc: BoundaryCondition,
    pub grid: GridConfig,
    pub tasks: Vec<Task>,
    pub region: Option<Region>,
    pub riesz: RieszConfig,
    pub output_dir: String,
}

pub fn load(path: &std::path::Path) -> Result<RunConfig> {
    let raw = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let config: RunConfig = serde_json::from_str(&raw).map_err(|e| {
        anyhow!(
            "{}:{}:{}: schema violation: {e}",
            path.display(),
            e.line(),
            e.column()
        )
    })?;
    if config.version != 1 {
        bail!("config version {} unsupported (expected 1)", config.version);
    }
    Ok(config)
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        bail!("{what}: coefficient must be finite, got {v}")
    }
}

fn terms(list: &[TermConfig], field: &str) -> Result<ScalarFunction> {
    let mut out = ScalarFunction::zero();
    for (i, term) in list.iter().enumerate() {
        let at = format!("{field}[{i}]");
        let part = match term {
            TermConfig::Monomial { coeff, power } => ScalarFunction {
                terms: vec![Term {
                    kind: TermKind::Monomial,
                    coeff: Complex64::new(finite(coeff[0], &at)?, finite(coeff[1], &at)?),
                    param: finite(*power, &at)?,
                }],
            },
            TermConfig::Trig { coeff, freq } => ScalarFunction {
                terms: vec![Term {
                    kind: TermKind::Trig,
                    coeff: Complex64::new(finite(coeff[0], &at)?, finite(coeff[1], &at)?),
                    param: finite(*freq, &at)?,
                }],
            },
            TermConfig::Sin { amp, freq } => {
                ScalarFunction::sin(finite(*amp, &at)?, finite(*freq, &at)?)
            }
            TermConfig::Cos { amp, freq } => {
                ScalarFunction::cos(finite(*amp, &at)?, finite(*freq, &at)?)
            }
        };
        out = out.plus(part);
    }
    Ok(out)
}

fn poly(coeffs: &[[f64; 2]], field: &str) -> Result<ComplexPolynomial> {
    let mut out = Vec::with_capacity(coeffs.len());
    for (i, pair) in coeffs.iter().enumerate() {
        let at = format!("{field}[{i}]");
        out.push(Complex64::new(
            finite(pair[0], &at)?,
            finite(pair[1], &at)?,
        ));
    }
    Ok(ComplexPolynomial::new(out))
}

pub fn resolve(
    config: &RunConfig,
    grid_points_override: Option<usize>,
    tasks_override: Option<Vec<Task>>,
    output_override: Option<String>,
) -> Result<Resolved> {
    let sys = &config.system;
    let mut spec = SystemSpec::new(
        sys.a,
        sys.b,
        terms(&sys.q1, "system.q1")?,
        terms(&sys.q2, "system.q2")?,
    );
    if let Some(kernel) = &sys.kernel {
        let mut k = KernelFunction::zero();
        for (name, source, slot) in [
            ("m11", &kernel.m11, (0usize, 0usize)),
            ("m12", &kernel.m12, (0, 1)),
            ("m21", &kernel.m21, (1, 0)),
            ("m22", &kernel.m22, (1, 1)),
        ] {
            for (i, sep) in source.iter().enumerate() {
                k.entries[slot.0][slot.1].push(SeparableTerm {
                    f: terms(&sep.f, &format!("system.kernel.{name}[{i}].f"))?,
                    g: terms(&sep.g, &format!("system.kernel.{name}[{i}].g"))?,
                });
            }
        }
        spec = spec.with_kernel(k);
    }
    dirac_spectra::model::validate_system(&spec).map_err(|e| anyhow!("system: {e}"))?;

    let bc = match &config.boundary {
        BoundaryConfig::Linear { rows } => {
            let row = |i: usize| -> Result<[ComplexPolynomial; 4]> {
                Ok([
                    poly(&rows[i][0], &format!("boundary.rows[{i}][0]"))?,
                    poly(&rows[i][1], &format!("boundary.rows[{i}][1]"))?,
                    poly(&rows[i][2], &format!("boundary.rows[{i}][2]"))?,
                    poly(&rows[i][3], &format!("boundary.rows[{i}][3]"))?,
                ])
            };
            BoundaryCondition::Linear(LinearBc::new([row(0)?, row(1)?]))
        }
        BoundaryConfig::Quadratic { rows } => {
            let row = |i: usize| -> Result<[ComplexPolynomial; 10]> {
                let out = rows[i]
                    .iter()
                    .enumerate()
                    .map(|(j, coeffs)| poly(coeffs, &format!("boundary.rows[{i}][{j}]")))
                    .collect::<Result<Vec<_>>>()?;
                Ok(out.try_into().unwrap())
            };
            BoundaryCondition::Quadratic(QuadraticBc::new([row(0)?, row(1)?]))
        }
        BoundaryConfig::Separated { p11, p12, p21, p22 } => BoundaryCondition::Separated(
            SeparatedBc::new(
                poly(p11, "boundary.p11")?,
                poly(p12, "boundary.p12")?,
                poly(p21, "boundary.p21")?,
                poly(p22, "boundary.p22")?,
            )
            .map_err(|e| anyhow!("boundary: {e}"))?,
        ),
    };

    let rule = match config.grid.quad_rule.as_str() {
        "simpson" => QuadRule::Simpson,
        "trapezoid" => QuadRule::Trapezoid,
        other => bail!("grid.quad_rule: unknown rule {other:?}"),
    };
    let n_points = grid_points_override.unwrap_or(config.grid.n_points);
    let grid = GridConfig::new(
        n_points,
        rule,
        config.grid.newton_tol,
        config.grid.contour_samples,
    )
    .map_err(|e| anyhow!("grid: {e}"))?;

    let tasks = tasks_override.unwrap_or_else(|| config.tasks.clone());
    if tasks.is_empty() {
        bail!("tasks: at least one task required");
    }

    let region = match &config.spectrum {
        Some(sc) => match (&sc.n_range, &sc.rect) {
            (Some(_), Some(_)) => bail!("spectrum: give either n_range or rect, not both"),
            (Some([lo, hi]), None) => {
                if lo > hi {
                    bail!("spectrum.n_range: empty range");
                }
                Some(Region::StripRange {
                    n_lo: *lo,
                    n_hi: *hi,
                    im_band: sc.im_band,
                })
            }
            (None, Some(r)) => {
                if r.re[0] >= r.re[1] || r.im[0] >= r.im[1] {
                    bail!("spectrum.rect: degenerate rectangle");
                }
                Some(Region::Rect(Rect::new(r.re[0], r.re[1], r.im[0], r.im[1])))
            }
            (None, None) => None,
        },
        None => None,
    };
    let region = match region {
        Some(r) => Some(r),
        None if matches!(bc, BoundaryCondition::Separated(_)) => Some(Region::StripRange {
            n_lo: -20,
            n_hi: 20,
            im_band: None,
        }),
        None => None,
    };
    let needs_region = tasks.iter().any(|t| {
        matches!(
            t,
            Task::Spectrum | Task::Eigenfunctions | Task::ValidateAsymptotics | Task::RieszReport
        )
    });
    if needs_region && region.is_none() {
        bail!("spectrum: a search region (rect) is required for non-separated conditions");
    }

    Ok(Resolved {
        spec,
        bc,
        grid,
        tasks,
        region,
        riesz: config.riesz.clone().unwrap_or_default(),
        output_dir: output_override.unwrap_or_else(|| config.output_dir.clone()),
    })
}
