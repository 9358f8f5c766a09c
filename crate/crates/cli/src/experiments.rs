//! Experiment implementations: resolve the config, run the library
//! operations, and write deterministic artifacts plus a manifest.

use crate::{CliError, CommonArgs};
use quasibasis::coboundary::{avdonin_deltas, build_coboundary, find_avdonin_n, verify_cocycle};
use quasibasis::diophantine::{IrrationalAlpha, TorusPoint};
use quasibasis::discrepancy::{
    dichotomy_report_with, discrepancy_series, BmoReport, DichotomyVerdict, WindowFamily,
    M_BOUND_DEFAULT,
};
use quasibasis::ergodic::{variance_curve, TrigPolynomial, VarianceLimit};
use quasibasis::frames::{duality_trend, pavlov_bmo_diagnostic, riesz_trend, TrendTable};
use quasibasis::quasicrystal::lambda_slice;
use quasibasis::torus_sets::{parse_interval, parse_set, MultibandSet};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::path::Path;
use std::time::Instant;

type Result<T> = std::result::Result<T, CliError>;

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn numerical_err(e: impl std::fmt::Display) -> CliError {
    CliError::Numerical(e.to_string())
}

/// Frame-analysis errors split into misconfiguration (exit 2) and genuine
/// numerical failures (exit 3).
fn frames_err(e: quasibasis::frames::FramesError) -> CliError {
    use quasibasis::frames::FramesError as F;
    match e {
        F::MeasureMismatch { .. } | F::BadSamplingDensity(_) | F::DimensionTooLarge(_) => {
            CliError::Config(e.to_string())
        }
        _ => CliError::Numerical(e.to_string()),
    }
}

fn resolve_alpha(common: &CommonArgs) -> Result<IrrationalAlpha> {
    let alpha = IrrationalAlpha::parse(&common.alpha).map_err(config_err)?;
    if common.exact && !alpha.is_exact() {
        return Err(CliError::Config(
            "--exact requires a quad:p,q,d,r alpha".to_string(),
        ));
    }
    if common.float && alpha.is_exact() {
        return IrrationalAlpha::high_prec(alpha.value_dd()).map_err(config_err);
    }
    Ok(alpha)
}

fn parse_usize_list(s: &str) -> Result<Vec<usize>> {
    let list: std::result::Result<Vec<usize>, _> =
        s.split(',').map(|t| t.trim().parse::<usize>()).collect();
    let list = list.map_err(|_| CliError::Config(format!("cannot parse list `{s}`")))?;
    if list.is_empty() || list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Config(format!(
            "list `{s}` must be strictly increasing"
        )));
    }
    Ok(list)
}

fn parse_window(s: &str) -> Result<(i64, i64)> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(CliError::Config(format!("window `{s}` must be lo,hi")));
    }
    let lo = parts[0].trim().parse().map_err(config_err)?;
    let hi = parts[1].trim().parse().map_err(config_err)?;
    if lo >= hi {
        return Err(CliError::Config(format!("window `{s}` must have lo < hi")));
    }
    Ok((lo, hi))
}

struct Stages {
    rows: Vec<(String, u128)>,
    last: Instant,
}

impl Stages {
    fn new() -> Self {
        Stages {
            rows: Vec::new(),
            last: Instant::now(),
        }
    }

    fn mark(&mut self, name: &str) {
        self.rows
            .push((name.to_string(), self.last.elapsed().as_millis()));
        self.last = Instant::now();
    }

    fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|(name, ms)| json!({"name": name, "wall_ms": ms}))
                .collect(),
        )
    }
}

fn write_artifacts(
    out: &Path,
    kind: &str,
    config: Value,
    report: Value,
    stages: &Stages,
    extra_files: &[(&str, Vec<u8>)],
) -> Result<()> {
    std::fs::create_dir_all(out).map_err(config_err)?;
    let config_text = serde_json::to_string(&config).map_err(config_err)?;
    let mut hasher = Sha256::new();
    hasher.update(config_text.as_bytes());
    let config_hash = format!("{:x}", hasher.finalize());

    let manifest = json!({
        "schema_version": 1,
        "kind": kind,
        "config": config,
        "config_hash": config_hash,
        "library_version": env!("CARGO_PKG_VERSION"),
        "stages": stages.to_json(),
    });
    std::fs::write(
        out.join("manifest.json"),
        serde_json::to_string_pretty(&manifest).map_err(config_err)? + "\n",
    )
    .map_err(config_err)?;
    std::fs::write(
        out.join("report.json"),
        serde_json::to_string_pretty(&report).map_err(config_err)? + "\n",
    )
    .map_err(config_err)?;
    for (name, bytes) in extra_files {
        std::fs::write(out.join(name), bytes).map_err(config_err)?;
    }
    Ok(())
}

fn bmo_json(report: &BmoReport) -> Value {
    json!({
        "l1": report.l1_norm,
        "l2": report.l2_norm,
        "worst_window": [report.worst_window.0, report.worst_window.1],
        "N": report.n,
        "family": match report.family {
            WindowFamily::AllDyadic => "AllDyadic",
            WindowFamily::Exhaustive => "Exhaustive",
        },
    })
}

fn trend_json(table: &TrendTable) -> Value {
    Value::Array(
        table
            .rows
            .iter()
            .map(|r| {
                json!({
                    "n": r.n,
                    "lambda_min": r.lambda_min,
                    "lambda_max": r.lambda_max,
                    "residual": r.residual,
                })
            })
            .collect(),
    )
}

fn trend_csv(table: &TrendTable) -> Vec<u8> {
    let mut buf = Vec::new();
    table.export_csv(&mut buf).expect("in-memory write");
    buf
}

fn resolve_set(
    alpha: &IrrationalAlpha,
    interval: Option<&str>,
    set: Option<&str>,
) -> Result<MultibandSet> {
    match (interval, set) {
        (Some(spec), None) => Ok(MultibandSet::single(
            parse_interval(spec, alpha).map_err(config_err)?,
        )),
        (None, Some(spec)) => parse_set(spec, alpha).map_err(config_err),
        _ => Err(CliError::Config(
            "exactly one of --interval/--set is required".to_string(),
        )),
    }
}

pub fn run_dichotomy(
    common: &CommonArgs,
    interval: Option<&str>,
    set: Option<&str>,
    n: &str,
    tol: f64,
) -> Result<()> {
    if tol <= 0.0 {
        return Err(CliError::Config("tol must be positive".to_string()));
    }
    let mut stages = Stages::new();
    let alpha = resolve_alpha(common)?;
    let set_obj = resolve_set(&alpha, interval, set)?;
    let n_list = parse_usize_list(n)?;
    stages.mark("parse");

    let n_max = *n_list.last().unwrap();
    let series = discrepancy_series(&alpha, &set_obj, n_max, &TorusPoint::zero());
    let report = dichotomy_report_with(&series, &n_list, M_BOUND_DEFAULT, tol);
    stages.mark("compute");

    let mut csv = Vec::new();
    series.export_csv(&mut csv).expect("in-memory write");
    let report_json = json!({
        "verdict": match report.verdict {
            DichotomyVerdict::BoundedPredicted => "BoundedPredicted",
            DichotomyVerdict::UnboundedBmoPredicted => "UnboundedBmoPredicted",
        },
        "certificate": report.certificate.map(|c| json!([c.m, c.n])).unwrap_or(Value::Null),
        "rows": report.rows.iter().map(|r| json!({
            "n": r.n,
            "sup_abs_d": r.sup_abs_d,
            "bmo": bmo_json(&r.bmo),
        })).collect::<Vec<_>>(),
        "boundary_flags": report.boundary_flag_count,
        "measure": set_obj.measure(),
    });
    let config = json!({
        "alpha": alpha.label(),
        "set": set.or(interval),
        "n": n_list,
        "tol": tol,
        "seed": common.seed,
    });
    stages.mark("write");
    write_artifacts(
        &common.out,
        "dichotomy",
        config,
        report_json,
        &stages,
        &[("d_series.csv", csv)],
    )
}

pub fn run_gram(
    common: &CommonArgs,
    interval: &str,
    set: Option<&str>,
    sizes: &str,
    dump_gram: bool,
) -> Result<()> {
    let mut stages = Stages::new();
    let alpha = resolve_alpha(common)?;
    let iv = parse_interval(interval, &alpha).map_err(config_err)?;
    let set_obj = resolve_set(&alpha, set.is_none().then_some(interval), set)?;
    let size_list = parse_usize_list(sizes)?;
    stages.mark("parse");

    let table = riesz_trend(&alpha, &iv, &set_obj, &size_list).map_err(frames_err)?;
    let mut extra: Vec<(String, Vec<u8>)> = vec![("trend.csv".to_string(), trend_csv(&table))];
    if dump_gram {
        use quasibasis::frames::{centered_elements, gram_section_of};
        let max_size = *size_list.last().unwrap();
        let window = quasibasis::torus_sets::MultibandSet::single(iv.clone());
        let lambdas = centered_elements(&alpha, &window, max_size).map_err(frames_err)?;
        let gram = gram_section_of(&lambdas, &set_obj).map_err(frames_err)?;
        let mut bin = Vec::new();
        gram.export_binary(&mut bin).expect("in-memory write");
        extra.push((format!("gram_{max_size}.bin"), bin));
    }
    stages.mark("compute");

    let report_json = json!({
        "rows": trend_json(&table),
        "interlacing": table.interlacing_holds(),
    });
    let config = json!({
        "alpha": alpha.label(),
        "interval": interval,
        "set": set,
        "sizes": size_list,
        "dump_gram": dump_gram,
        "seed": common.seed,
    });
    stages.mark("write");
    let files: Vec<(&str, Vec<u8>)> = extra.iter().map(|(n, b)| (n.as_str(), b.clone())).collect();
    write_artifacts(&common.out, "gram", config, report_json, &stages, &files)
}

pub fn run_duality(
    common: &CommonArgs,
    interval: &str,
    set: Option<&str>,
    sizes: &str,
) -> Result<()> {
    let mut stages = Stages::new();
    let alpha = resolve_alpha(common)?;
    let iv = parse_interval(interval, &alpha).map_err(config_err)?;
    let set_obj = resolve_set(&alpha, set.is_none().then_some(interval), set)?;
    let size_list = parse_usize_list(sizes)?;
    stages.mark("parse");

    let (primal, dual) = duality_trend(&alpha, &iv, &set_obj, &size_list).map_err(frames_err)?;
    stages.mark("compute");

    let report_json = json!({
        "primal": trend_json(&primal),
        "dual": trend_json(&dual),
        "interlacing": primal.interlacing_holds() && dual.interlacing_holds(),
    });
    let config = json!({
        "alpha": alpha.label(),
        "interval": interval,
        "set": set,
        "sizes": size_list,
        "seed": common.seed,
    });
    stages.mark("write");
    write_artifacts(
        &common.out,
        "duality",
        config,
        report_json,
        &stages,
        &[
            ("trend_primal.csv", trend_csv(&primal)),
            ("trend_dual.csv", trend_csv(&dual)),
        ],
    )
}

fn load_poly(path: &Path) -> Result<TrigPolynomial> {
    let text = std::fs::read_to_string(path).map_err(config_err)?;
    let value: Value = serde_json::from_str(&text).map_err(config_err)?;
    let obj = value
        .as_object()
        .ok_or_else(|| CliError::Config("polynomial JSON must be an object".to_string()))?;
    let mut pairs = Vec::new();
    for (k, v) in obj {
        let k: i64 = k
            .parse()
            .map_err(|_| CliError::Config(format!("bad frequency `{k}`")))?;
        let arr = v
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| CliError::Config(format!("coefficient of {k} must be [re, im]")))?;
        let re = arr[0].as_f64().ok_or_else(|| config_err("bad re"))?;
        let im = arr[1].as_f64().ok_or_else(|| config_err("bad im"))?;
        pairs.push((k, num_complex(re, im)));
    }
    TrigPolynomial::new(pairs).map_err(config_err)
}

fn num_complex(re: f64, im: f64) -> quasibasis::ergodic::Complex64 {
    quasibasis::ergodic::Complex64::new(re, im)
}

pub fn run_variance(
    common: &CommonArgs,
    poly: Option<&Path>,
    random_degree: Option<i64>,
    n: &str,
) -> Result<()> {
    let mut stages = Stages::new();
    let alpha = resolve_alpha(common)?;
    let n_list = parse_usize_list(n)?;
    let f = match (poly, random_degree) {
        (Some(path), None) => load_poly(path)?,
        (None, Some(degree)) => {
            if !(1..=10_000).contains(&degree) {
                return Err(CliError::Config(format!(
                    "random degree {degree} out of range 1..=10000"
                )));
            }
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(common.seed);
            TrigPolynomial::random(&mut rng, degree, true)
        }
        _ => {
            return Err(CliError::Config(
                "exactly one of --poly/--random-degree is required".to_string(),
            ))
        }
    };
    stages.mark("parse");

    let curve = variance_curve(&f, &alpha, &n_list).map_err(numerical_err)?;
    stages.mark("compute");

    let mut csv = Vec::new();
    curve.export_csv(&mut csv).expect("in-memory write");
    let poly_json: Value = Value::Object(
        f.coeffs()
            .map(|(k, c)| (k.to_string(), json!([c.re, c.im])))
            .collect(),
    );
    let report_json = json!({
        "n_list": curve.n_list,
        "v_direct": curve.v_direct,
        "v_kernel": curve.v_kernel,
        "v_limit": match curve.v_limit {
            VarianceLimit::Finite(v) => json!(v),
            VarianceLimit::Infinite => json!("inf"),
        },
        "polynomial": poly_json,
    });
    let config = json!({
        "alpha": alpha.label(),
        "poly": poly.map(|p| p.display().to_string()),
        "random_degree": random_degree,
        "n": n_list,
        "seed": common.seed,
    });
    stages.mark("write");
    write_artifacts(
        &common.out,
        "variance",
        config,
        report_json,
        &stages,
        &[("variance.csv", csv)],
    )
}

pub fn run_coboundary(
    common: &CommonArgs,
    set: &str,
    window: &str,
    normalize: bool,
    grid: usize,
) -> Result<()> {
    let mut stages = Stages::new();
    let alpha = resolve_alpha(common)?;
    let set_obj = parse_set(set, &alpha).map_err(config_err)?;
    let (lo, hi) = parse_window(window)?;
    stages.mark("parse");

    let g = build_coboundary(&set_obj, &alpha, normalize).map_err(config_err)?;
    let check = verify_cocycle(&g, &set_obj, &alpha, grid, common.seed);
    let slice = lambda_slice(&alpha, &set_obj, lo, hi).map_err(numerical_err)?;
    let deltas = avdonin_deltas(&g, &slice).map_err(numerical_err)?;
    let avdonin_n = find_avdonin_n(&deltas.deltas, 0.25, 1000);
    stages.mark("compute");

    let g_json = json!({
        "terms": g.terms().iter().map(|(c, s)| json!({
            "coeff": c,
            "shift": s.value(),
        })).collect::<Vec<_>>(),
        "offset": g.offset(),
    });
    let mut deltas_csv = Vec::new();
    deltas.export_csv(&mut deltas_csv).expect("in-memory write");
    let report_json = json!({
        "max_residual": check.max_residual,
        "perturbed_points": check.perturbed_points,
        "grid": grid,
        "c": deltas.c,
        "avdonin_n": avdonin_n,
        "term_count": g.terms().len(),
        "normalize": normalize,
    });
    let config = json!({
        "alpha": alpha.label(),
        "set": set,
        "window": [lo, hi],
        "normalize": normalize,
        "grid": grid,
        "seed": common.seed,
    });
    stages.mark("write");
    write_artifacts(
        &common.out,
        "coboundary",
        config,
        report_json,
        &stages,
        &[
            (
                "g.json",
                (serde_json::to_string_pretty(&g_json).unwrap() + "\n").into_bytes(),
            ),
            ("deltas.csv", deltas_csv),
        ],
    )
}

pub fn run_pavlov(
    common: &CommonArgs,
    interval: Option<&str>,
    set: Option<&str>,
    a: Option<f64>,
    window: &str,
    family: &str,
) -> Result<()> {
    let mut stages = Stages::new();
    let alpha = resolve_alpha(common)?;
    let set_obj = resolve_set(&alpha, interval, set)?;
    let (lo, hi) = parse_window(window)?;
    let family = match family {
        "dyadic" => WindowFamily::AllDyadic,
        "exhaustive" => WindowFamily::Exhaustive,
        other => {
            return Err(CliError::Config(format!(
                "family must be dyadic or exhaustive, got `{other}`"
            )))
        }
    };
    if family == WindowFamily::Exhaustive && (hi - lo) > (1 << 13) {
        return Err(CliError::Config(
            "exhaustive family is limited to windows of 2^13".to_string(),
        ));
    }
    stages.mark("parse");

    let slice = lambda_slice(&alpha, &set_obj, lo, hi).map_err(numerical_err)?;
    let density = a.unwrap_or_else(|| set_obj.measure());
    let report = pavlov_bmo_diagnostic(&slice, density, family).map_err(frames_err)?;
    stages.mark("compute");

    let report_json = json!({
        "bmo": bmo_json(&report),
        "a": density,
        "window": [lo, hi],
    });
    let config = json!({
        "alpha": alpha.label(),
        "interval": interval,
        "set": set,
        "a": density,
        "window": [lo, hi],
        "family": match family {
            WindowFamily::AllDyadic => "dyadic",
            WindowFamily::Exhaustive => "exhaustive",
        },
        "seed": common.seed,
    });
    stages.mark("write");
    write_artifacts(&common.out, "pavlov", config, report_json, &stages, &[])
}

/// Aggregate a run directory into one summary JSON document on stdout.
pub fn emit_report(dir: &Path) -> Result<()> {
    let manifest_text = std::fs::read_to_string(dir.join("manifest.json"))
        .map_err(|_| CliError::Config(format!("missing manifest in {}", dir.display())))?;
    let manifest: Value = serde_json::from_str(&manifest_text)
        .map_err(|_| CliError::Config("corrupt manifest.json".to_string()))?;
    let kind = manifest
        .get("kind")
        .and_then(|v| v.as_str())
        .ok_or_else(|| CliError::Config("manifest lacks kind".to_string()))?
        .to_string();
    let report_text = std::fs::read_to_string(dir.join("report.json"))
        .map_err(|_| CliError::Config(format!("missing report in {}", dir.display())))?;
    let report: Value = serde_json::from_str(&report_text)
        .map_err(|_| CliError::Config("corrupt report.json".to_string()))?;

    let mut summary = serde_json::Map::new();
    summary.insert("schema_version".to_string(), json!(1));
    summary.insert("kind".to_string(), json!(kind));
    summary.insert(
        "config_hash".to_string(),
        manifest.get("config_hash").cloned().unwrap_or(Value::Null),
    );
    match kind.as_str() {
        "dichotomy" => {
            let rows = report.get("rows").and_then(|r| r.as_array());
            if let Some(rows) = rows {
                if let Some(last) = rows.last() {
                    summary.insert(
                        "sup_abs_D".to_string(),
                        last.get("sup_abs_d").cloned().unwrap_or(Value::Null),
                    );
                    summary.insert(
                        "bmo_l2".to_string(),
                        last.pointer("/bmo/l2").cloned().unwrap_or(Value::Null),
                    );
                }
            }
            summary.insert(
                "certificate".to_string(),
                report.get("certificate").cloned().unwrap_or(Value::Null),
            );
            summary.insert(
                "verdict".to_string(),
                report.get("verdict").cloned().unwrap_or(Value::Null),
            );
        }
        "gram" | "duality" => {
            let key = if kind == "gram" { "rows" } else { "primal" };
            if let Some(rows) = report.get(key).and_then(|r| r.as_array()) {
                if let (Some(first), Some(last)) = (rows.first(), rows.last()) {
                    summary.insert(
                        "lambda_min_first".to_string(),
                        first.get("lambda_min").cloned().unwrap_or(Value::Null),
                    );
                    summary.insert(
                        "lambda_min_last".to_string(),
                        last.get("lambda_min").cloned().unwrap_or(Value::Null),
                    );
                    summary.insert(
                        "lambda_max_last".to_string(),
                        last.get("lambda_max").cloned().unwrap_or(Value::Null),
                    );
                }
            }
            summary.insert(
                "interlacing".to_string(),
                report.get("interlacing").cloned().unwrap_or(Value::Null),
            );
        }
        "variance" => {
            summary.insert(
                "v_limit".to_string(),
                report.get("v_limit").cloned().unwrap_or(Value::Null),
            );
        }
        "coboundary" => {
            summary.insert(
                "max_residual".to_string(),
                report.get("max_residual").cloned().unwrap_or(Value::Null),
            );
            summary.insert(
                "avdonin_n".to_string(),
                report.get("avdonin_n").cloned().unwrap_or(Value::Null),
            );
        }
        "pavlov" => {
            summary.insert(
                "bmo".to_string(),
                report.get("bmo").cloned().unwrap_or(Value::Null),
            );
        }
        _ => {
            summary.insert("report".to_string(), report);
        }
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&Value::Object(summary)).map_err(config_err)?
    );
    Ok(())
}
