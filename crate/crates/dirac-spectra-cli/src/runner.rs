//! Task orchestration: conditions -> spectrum -> eigenfunctions ->
//! diagnostics, with JSON/CSV artifact emission.

use crate::config::{Resolved, Task};
use anyhow::{anyhow, Context, Result};
use dirac_spectra::cauchy::fmt17;
use dirac_spectra::charfn::{
    check_linear_condition, check_quadratic_condition, CharContext,
};
use dirac_spectra::eigensystem::build_root_functions;
use dirac_spectra::model::{check_rank2, BoundaryCondition};
use dirac_spectra::riesz::{
    canonical_eigenfunction, canonical_transformed_family, completeness_residual,
    default_test_set, gram_condition, reference_basis, select_exclusion, tail_sum,
    ExclusionStrategy,
};
use dirac_spectra::spectrum::{
    locate_spectrum, verify_asymptotics, write_spectrum_csv, SpectralPoint,
};
use num_complex::Complex64;
use serde_json::{json, Value};
use std::fs;
use std::path::{Path, PathBuf};

/// Exit disposition of a run: conditions verdict and numerical aborts
/// map to the documented nonzero codes.
pub enum Outcome {
    Success,
    ConditionsFailed,
}

pub fn run(resolved: &Resolved) -> Result<Outcome> {
    let out_dir = PathBuf::from(&resolved.output_dir);
    fs::create_dir_all(&out_dir)
        .with_context(|| format!("cannot create output dir {}", out_dir.display()))?;

    let ctx = CharContext::new(
        resolved.spec.clone(),
        resolved.bc.clone(),
        resolved.grid,
    )
    .map_err(|e| anyhow!("context: {e}"))?;

    let mut conditions_ok = true;
    // dependency order: conditions, spectrum, eigenfunctions, diagnostics
    let mut tasks = resolved.tasks.clone();
    tasks.sort_by_key(|t| match t {
        Task::CheckConditions => 0,
        Task::Spectrum => 1,
        Task::Eigenfunctions => 2,
        Task::ValidateAsymptotics => 3,
        Task::RieszReport => 4,
    });
    tasks.dedup();

    let mut points: Option<Vec<SpectralPoint>> = None;
    let mut ensure_points = |ctx: &CharContext| -> Result<Vec<SpectralPoint>> {
        if let Some(p) = &points {
            return Ok(p.clone());
        }
        let region = resolved
            .region
            .as_ref()
            .ok_or_else(|| anyhow!("spectrum region missing"))?;
        let result = locate_spectrum(ctx, region).map_err(|e| anyhow!("spectrum: {e}"))?;
        for anomaly in &result.anomalies {
            eprintln!("warning: {anomaly}");
        }
        points = Some(result.points.clone());
        Ok(result.points)
    };

    for task in &tasks {
        match task {
            Task::CheckConditions => {
                let report = conditions_report(&ctx);
                conditions_ok = report
                    .get("satisfied")
                    .and_then(Value::as_bool)
                    .unwrap_or(false);
                write_json(&out_dir.join("conditions.json"), &report)?;
            }
            Task::Spectrum => {
                let pts = ensure_points(&ctx)?;
                let mut file = fs::File::create(out_dir.join("spectrum.csv"))?;
                write_spectrum_csv(&pts, &mut file)?;
            }
            Task::Eigenfunctions => {
                let pts = ensure_points(&ctx)?;
                let dir = out_dir.join("eigenfunctions");
                fs::create_dir_all(&dir)?;
                for (idx, pt) in pts.iter().enumerate() {
                    let rfs = build_root_functions(&ctx, pt)
                        .map_err(|e| anyhow!("eigenfunctions at {}: {e}", pt.lambda))?;
                    for rf in rfs {
                        let name =
                            format!("lambda_{idx:03}_b{}_k{}.csv", rf.branch, rf.order);
                        let mut file = fs::File::create(dir.join(name))?;
                        rf.write_csv(&mut file)?;
                    }
                }
            }
            Task::ValidateAsymptotics => {
                let pts = ensure_points(&ctx)?;
                let report = verify_asymptotics(&ctx, &pts)
                    .map_err(|e| anyhow!("validate-asymptotics: {e}"))?;
                let rows: Vec<Value> = report
                    .rows
                    .iter()
                    .map(|r| {
                        json!({
                            "n": r.n,
                            "lambda": [r.lambda.re, r.lambda.im],
                            "model_root": [r.model_root.re, r.model_root.im],
                            "scaled_error": r.scaled_error,
                        })
                    })
                    .collect();
                let value = json!({
                    "rows": rows,
                    "max_scaled_error": report.max_scaled_error,
                    "non_increasing_trend": report.non_increasing_trend,
                    "strip_counts": report.strip_counts,
                    "anomalous_strips": report.anomalous_strips,
                });
                write_json(&out_dir.join("asymptotics.json"), &value)?;
            }
            Task::RieszReport => {
                let pts = ensure_points(&ctx)?;
                let value = riesz_report(&ctx, &pts, resolved)?;
                write_json(&out_dir.join("riesz.json"), &value)?;
            }
        }
    }

    Ok(if conditions_ok {
        Outcome::Success
    } else {
        Outcome::ConditionsFailed
    })
}

fn conditions_report(ctx: &CharContext) -> Value {
    let rank = check_rank2(&ctx.bc);
    let mut notes: Vec<String> = Vec::new();
    let (condition, condition_ok) = match &ctx.bc {
        BoundaryCondition::Linear(bc) => {
            let r = check_linear_condition(bc);
            (
                json!({
                    "name": "linear-degree-condition",
                    "deg_j14": r.deg_j14.to_string(),
                    "deg_j32": r.deg_j32.to_string(),
                    "deg_j13": r.deg_j13.to_string(),
                    "deg_j42": r.deg_j42.to_string(),
                    "max_p_degree": r.max_p_degree.to_string(),
                    "satisfied": r.satisfied,
                    "allowed_removals": r.allowed_removals,
                }),
                r.satisfied,
            )
        }
        BoundaryCondition::Separated(bc) => {
            let r = check_linear_condition(&bc.embed_linear());
            let derived = bc.leading_ratio();
            let row_paired = bc.row_paired_ratio();
            notes.push(format!(
                "model-root ratio: derived C11*C22/(C12*C21) = {derived}; the row-paired convention C11*C21/(C12*C22) gives {row_paired}"
            ));
            (
                json!({
                    "name": "linear-degree-condition (embedded separated)",
                    "deg_j14": r.deg_j14.to_string(),
                    "deg_j32": r.deg_j32.to_string(),
                    "deg_j13": r.deg_j13.to_string(),
                    "deg_j42": r.deg_j42.to_string(),
                    "max_p_degree": r.max_p_degree.to_string(),
                    "satisfied": r.satisfied,
                    "allowed_removals": r.allowed_removals,
                }),
                r.satisfied,
            )
        }
        BoundaryCondition::Quadratic(bc) => {
            let r = check_quadratic_condition(bc);
            notes.push(
                "lower half-plane leading coefficient taken as J03^2 (the coefficient of ψ_02^4(1/2)); the alternate J01^2 variant is reported by the asymptote API"
                    .to_string(),
            );
            (
                json!({
                    "name": "quadratic-degree-condition",
                    "deg_j03": r.deg_j03.to_string(),
                    "deg_j12": r.deg_j12.to_string(),
                    "max_p_degree": r.max_p_degree.to_string(),
                    "satisfied": r.satisfied,
                    "allowed_removals": r.allowed_removals,
                }),
                r.satisfied,
            )
        }
    };
    json!({
        "family": ctx.bc.family(),
        "rank2": {
            "satisfied": rank.rank2_for_all_lambda,
            "witness": rank.witness.map(|w| vec![w.re, w.im]),
        },
        "condition": condition,
        "satisfied": rank.rank2_for_all_lambda && condition_ok,
        "notes": notes,
    })
}

fn riesz_report(ctx: &CharContext, points: &[SpectralPoint], resolved: &Resolved) -> Result<Value> {
    let sbc = match &ctx.bc {
        BoundaryCondition::Separated(sbc) => sbc,
        _ => anyhow::bail!("riesz-report needs separated boundary conditions"),
    };
    let rule = ctx.grid.quad_rule;
    let n_points = ctx.grid.n_points;

    let family = canonical_transformed_family(ctx, points).map_err(|e| anyhow!("riesz: {e}"))?;
    let refs: Vec<_> = family
        .iter()
        .map(|(n, _)| (*n, reference_basis(sbc, &ctx.spec, *n, n_points).0))
        .collect();
    let tail = tail_sum(&family, &refs, rule).map_err(|e| anyhow!("riesz: {e}"))?;

    // normalized family ordered by (|n|, n) for Gram and projections
    let mut sorted: Vec<&SpectralPoint> = points.iter().collect();
    sorted.sort_by_key(|p| {
        let n = p.strip_index.unwrap_or(i64::MAX);
        (n.abs(), n)
    });
    let normalized: Vec<_> = sorted
        .iter()
        .map(|p| {
            let f = canonical_eigenfunction(ctx, p.lambda)?;
            let norm = f.norm(rule);
            if norm < 1e-300 {
                return Err(dirac_spectra::Error::ZeroNorm);
            }
            Ok(f.scale(Complex64::new(1.0 / norm, 0.0)))
        })
        .collect::<dirac_spectra::Result<Vec<_>>>()
        .map_err(|e| anyhow!("riesz: {e}"))?;

    let mut gram_rows = Vec::new();
    for &k in &resolved.riesz.k_values {
        let take = (2 * k + 1).min(normalized.len());
        match gram_condition(&normalized[..take], rule) {
            Ok(cond) => gram_rows.push(json!({"k": k, "used": take, "condition": cond})),
            Err(e) => gram_rows.push(json!({"k": k, "used": take, "failure": e.to_string()})),
        }
    }

    let tests = default_test_set(n_points);
    let completeness = completeness_residual(&normalized, &tests, &resolved.riesz.k_values, rule);
    let completeness_rows: Vec<Value> = completeness
        .iter()
        .map(|row| {
            json!({
                "k": row.k,
                "used": row.used,
                "residual_norms": row.entries.iter().map(|e| e.residual_norm).collect::<Vec<_>>(),
                "relative_energies": row.entries.iter().map(|e| e.relative_energy).collect::<Vec<_>>(),
            })
        })
        .collect();

    let exclusion = match resolved.riesz.exclusion {
        Some(n) if n > 0 => {
            let set = select_exclusion(points, n, &ExclusionStrategy::LowestModulus)
                .map_err(|e| anyhow!("riesz exclusion: {e}"))?;
            Some(json!({
                "target_size": set.target_size,
                "removed": set
                    .removed
                    .iter()
                    .map(|(l, k)| json!({"lambda": [l.re, l.im], "order": k}))
                    .collect::<Vec<_>>(),
            }))
        }
        _ => None,
    };

    Ok(json!({
        "tail": {
            "per_term": tail
                .per_term
                .iter()
                .map(|t| json!({"n": t.n, "term_norm": t.term_norm, "scaled": t.scaled}))
                .collect::<Vec<_>>(),
            "partial_sums": tail.partial_sums,
        },
        "gram": gram_rows,
        "completeness": {
            "tests": ["(1,0)", "(0,1)", "(x,0)", "(0,x)", "step(1,0)"],
            "rows": completeness_rows,
        },
        "exclusion": exclusion,
        "conventions": {
            "model_ratio_derived": {
                "value": [sbc.leading_ratio().re, sbc.leading_ratio().im],
                "definition": "C11*C22/(C12*C21), from the zero-potential closed form",
            },
            "model_ratio_row_paired": {
                "value": [sbc.row_paired_ratio().re, sbc.row_paired_ratio().im],
                "definition": "row-paired convention C11*C21/(C12*C22)",
            },
        },
    }))
}

/// Debug dump requested as "RE,IM[,ALPHA]": solves the fundamental
/// pair at that λ (base point nearest grid node to ALPHA) and writes
/// fundamental.csv into the output directory.
pub fn dump_fundamental(resolved: &Resolved, request: &str) -> Result<()> {
    let parts: Vec<&str> = request.split(',').collect();
    if parts.len() < 2 || parts.len() > 3 {
        anyhow::bail!("--dump-fundamental expects RE,IM[,ALPHA]");
    }
    let re: f64 = parts[0].trim().parse().context("--dump-fundamental RE")?;
    let im: f64 = parts[1].trim().parse().context("--dump-fundamental IM")?;
    let alpha: f64 = if parts.len() == 3 {
        parts[2].trim().parse().context("--dump-fundamental ALPHA")?
    } else {
        0.0
    };
    if !(0.0..=1.0).contains(&alpha) {
        anyhow::bail!("--dump-fundamental ALPHA must lie in [0, 1]");
    }
    let grid = resolved.grid;
    let alpha_idx = (alpha / grid.h()).round() as usize;
    let it = dirac_spectra::cauchy::Integrator::new(&resolved.spec, &grid)
        .map_err(|e| anyhow!("integrator: {e}"))?;
    let fs = it
        .solve(alpha_idx, Complex64::new(re, im), 0)
        .map_err(|e| anyhow!("fundamental solution: {e}"))?;
    let out_dir = PathBuf::from(&resolved.output_dir);
    fs::create_dir_all(&out_dir)?;
    let mut file = fs::File::create(out_dir.join("fundamental.csv"))?;
    fs.write_csv(&mut file)?;
    Ok(())
}

/// Writes canonical pretty JSON (sorted keys, trailing newline).
pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// Plot-data extraction from run artifacts.
pub fn emit_plotdata(kind: &str, report_path: &Path, out_path: &Path) -> Result<()> {
    let mut csv = String::new();
    match kind {
        "spectrum" => {
            let raw = fs::read_to_string(report_path)
                .with_context(|| format!("cannot read {}", report_path.display()))?;
            csv.push_str("n,re_lambda,im_lambda\n");
            for line in raw.lines().skip(1) {
                let cols: Vec<&str> = line.split(',').collect();
                if cols.len() >= 3 {
                    csv.push_str(&format!("{},{},{}\n", cols[0], cols[1], cols[2]));
                }
            }
        }
        "asymptotics" => {
            let value: Value = serde_json::from_str(&fs::read_to_string(report_path)?)?;
            csv.push_str("n,e_n\n");
            for row in value["rows"].as_array().into_iter().flatten() {
                csv.push_str(&format!(
                    "{},{}\n",
                    row["n"],
                    fmt17(row["scaled_error"].as_f64().unwrap_or(f64::NAN))
                ));
            }
        }
        "riesz-tail" => {
            let value: Value = serde_json::from_str(&fs::read_to_string(report_path)?)?;
            csv.push_str("k,s_k\n");
            for pair in value["tail"]["partial_sums"].as_array().into_iter().flatten() {
                csv.push_str(&format!(
                    "{},{}\n",
                    pair[0],
                    fmt17(pair[1].as_f64().unwrap_or(f64::NAN))
                ));
            }
        }
        "gram" => {
            let value: Value = serde_json::from_str(&fs::read_to_string(report_path)?)?;
            csv.push_str("k,condition\n");
            for row in value["gram"].as_array().into_iter().flatten() {
                if let Some(cond) = row["condition"].as_f64() {
                    csv.push_str(&format!("{},{}\n", row["k"], fmt17(cond)));
                }
            }
        }
        other => anyhow::bail!("unknown plot kind {other:?}"),
    }
    fs::write(out_path, csv).with_context(|| format!("cannot write {}", out_path.display()))?;
    Ok(())
}
