use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Map, Value};

use cp2_willmore::invariants::{invariant_report, locate_h_zeros, InvariantReport};
use cp2_willmore::quadrature::build_grid;
use cp2_willmore::suites::{expectation_checks, run_suite, Check, Relation, Suite};
use cp2_willmore::torus_opt::{optimize_flat_torus, TorusOptimum};
use cp2_willmore::twistor::component_degree;
use cp2_willmore::zoo::FamilySpec;
use cp2_willmore::cvec::C64;
use cp2_willmore::{make_surface, Immersion, Result as GeomResult};

use crate::config::{parse_triple, Format, RunConfig};
use crate::render;
use crate::Failure;

pub struct Outcome {
    pub text: String,
    pub code: u8,
    /// Printed on stderr after the report.
    pub message: Option<String>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, code: 0, message: None }
    }
}

/// Value, error estimate and reference value of one reported quantity.
#[derive(Clone, Debug, Serialize)]
pub struct Quantity {
    pub name: String,
    pub value: f64,
    pub error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

pub struct Evaluation {
    pub grid: (usize, usize),
    pub quantities: Vec<Quantity>,
    pub checks: Vec<Check>,
}

fn twistor_quantities(surface: &cp2_willmore::Surface, grid: &cp2_willmore::quadrature::QuadratureGrid, zero_tol: f64) -> GeomResult<Vec<(String, f64, f64)>> {
    let coarse = grid.coarsened()?;
    let mut out = Vec::new();
    for which in [1u8, 2] {
        let fine = component_degree(surface, which, grid)?;
        let rough = component_degree(surface, which, &coarse)?;
        out.push((format!("d{which}"), fine.degree, (fine.degree - rough.degree).abs()));
    }
    let z = locate_h_zeros(surface, grid, zero_tol)?;
    if !z.identically_zero {
        out.push(("n_zeros_H".to_string(), z.count() as f64, 0.0));
    }
    Ok(out)
}

pub fn evaluate(spec: FamilySpec, cfg: &RunConfig) -> Result<Evaluation, Failure> {
    let surface = make_surface(spec)?;
    let res = cfg.grid_for(spec.domain());
    let grid = build_grid(spec.domain(), res.0, res.1)?;
    let report: InvariantReport = invariant_report(&surface, &grid)?;
    let meta = surface.meta().ok_or_else(|| Failure::numerical("surface carries no metadata"))?;
    let mut rows: Vec<(String, f64, f64)> = report.entries().into_iter().map(|(n, v, e)| (n.to_string(), v, e)).collect();
    if meta.negative_spin && spec.domain() == cp2_willmore::Domain::Sphere {
        rows.extend(twistor_quantities(&surface, &grid, cfg.zero_tol)?);
    }
    let mut checks = expectation_checks(&spec, &report, &meta);
    let quantities = rows
        .into_iter()
        .map(|(name, value, error)| {
            let ex = meta.expected.iter().find(|e| e.key == name);
            if let (Some(ex), true) = (ex, matches!(name.as_str(), "d1" | "d2" | "n_zeros_H")) {
                checks.push(Check::new(
                    format!("expected_{name}/{}", cp2_willmore::suites::short_label(&spec)),
                    ex.note,
                    value,
                    ex.value,
                    if name == "n_zeros_H" { 0.0 } else { 1e-6 },
                    Relation::Abs,
                ));
            }
            Quantity { name, value, error, expected: ex.map(|e| e.value), note: ex.map(|e| e.note.to_string()) }
        })
        .collect();
    Ok(Evaluation { grid: res, quantities, checks })
}

fn params_json(spec: &FamilySpec) -> Value {
    let mut m = Map::new();
    for (k, v) in spec.params() {
        m.insert(k, json!(v));
    }
    Value::Object(m)
}

pub fn eval(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let spec = cfg.surface()?;
    let ev = evaluate(spec, cfg)?;
    let text = match cfg.format {
        Format::Json => {
            let mut inv = Map::new();
            for q in &ev.quantities {
                let mut m = Map::new();
                m.insert("value".into(), json!(q.value));
                m.insert("error".into(), json!(q.error));
                if let Some(x) = q.expected {
                    m.insert("expected".into(), json!(x));
                }
                if let Some(n) = &q.note {
                    m.insert("note".into(), json!(n));
                }
                inv.insert(q.name.clone(), Value::Object(m));
            }
            let v = json!({
                "surface": spec.name(),
                "params": params_json(&spec),
                "grid": [ev.grid.0, ev.grid.1],
                "seed": cfg.seed,
                "invariants": inv,
                "checks": ev.checks.iter().map(render::check_json).collect::<Vec<_>>(),
            });
            render::json(&v)?
        }
        Format::Csv => render::csv_rows(
            &["name", "value", "error", "expected"],
            ev.quantities.iter().map(|q| {
                vec![q.name.clone(), render::num(q.value), render::num(q.error), q.expected.map(render::num).unwrap_or_default()]
            }),
        )?,
        Format::Text => {
            let mut s = format!("surface  {spec}\ngrid     {}x{}\n\n", ev.grid.0, ev.grid.1);
            s += &render::table(
                &["name", "value", "error", "expected"],
                ev.quantities.iter().map(|q| {
                    vec![q.name.clone(), render::num(q.value), render::num(q.error), q.expected.map(render::num).unwrap_or_default()]
                }),
            );
            if !ev.checks.is_empty() {
                s += "\n";
                s += &render::checks_table(&ev.checks);
            }
            s
        }
    };
    Ok(Outcome::ok(text))
}

pub fn verify(suite: Suite, cfg: &RunConfig) -> Result<Outcome, Failure> {
    let sc = cfg.suite_config();
    let checks = run_suite(suite, &sc);
    let failed = checks.iter().filter(|c| !c.passed()).count();
    let text = match cfg.format {
        Format::Json => render::json(&json!({
            "suite": suite.to_string(),
            "sphere_grid": [sc.sphere_grid.0, sc.sphere_grid.1],
            "torus_grid": [sc.torus_grid.0, sc.torus_grid.1],
            "seed": sc.seed,
            "points": sc.points,
            "passed": checks.len() - failed,
            "failed": failed,
            "checks": checks,
        }))?,
        Format::Csv => render::csv_rows(
            &["id", "basis", "computed", "expected", "tol", "relation", "status", "note"],
            checks.iter().map(|c| {
                vec![
                    c.id.clone(),
                    c.basis.clone(),
                    render::num(c.computed),
                    render::num(c.expected),
                    render::num(c.tol),
                    c.relation.to_string(),
                    c.status.to_string(),
                    c.note.clone().unwrap_or_default(),
                ]
            }),
        )?,
        Format::Text => {
            let mut s = render::checks_table(&checks);
            s += &format!("\n{} checks, {} passed, {} failed\n", checks.len(), checks.len() - failed, failed);
            s
        }
    };
    Ok(Outcome {
        text,
        code: if failed == 0 { 0 } else { 1 },
        message: (failed > 0).then(|| format!("{failed} of {} checks failed", checks.len())),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub surface: String,
    pub param: String,
    pub value: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub area: Option<f64>,
    #[serde(rename = "W")]
    pub w: Option<f64>,
    #[serde(rename = "Wplus")]
    pub wplus: Option<f64>,
    #[serde(rename = "Wminus")]
    pub wminus: Option<f64>,
    #[serde(rename = "Wminus_error")]
    pub wminus_error: Option<f64>,
    pub degree_d: Option<f64>,
    pub chi: Option<f64>,
    pub chi_perp: Option<f64>,
}

fn linspace(cfg: &RunConfig, from: f64, to: f64, steps: usize) -> Result<Vec<f64>, Failure> {
    let from = cfg.settings.parse::<f64>("from")?.unwrap_or(from);
    let to = cfg.settings.parse::<f64>("to")?.unwrap_or(to);
    let steps = cfg.settings.parse::<usize>("steps")?.unwrap_or(steps);
    if steps == 0 || !from.is_finite() || !to.is_finite() {
        return Err(Failure::config("scan range needs finite `from`, `to` and `steps` ≥ 1"));
    }
    if steps == 1 {
        return Ok(vec![from]);
    }
    Ok((0..steps).map(|k| from + (to - from) * k as f64 / (steps - 1) as f64).collect())
}

/// Parameter points of a scan, each with its label.
pub fn scan_points(cfg: &RunConfig) -> Result<(String, Vec<(String, FamilySpec)>), Failure> {
    let base = cfg.surface()?;
    let param = cfg.settings.get("param");
    let fmt = |x: f64| format!("{}", (x * 1e12).round() / 1e12);
    Ok(match base {
        FamilySpec::FlatTorus { .. } | FamilySpec::Clifford => {
            if param.is_some_and(|p| p != "r1") {
                return Err(Failure::config("flat torus scans vary `r1` (with r2 = r3)"));
            }
            let pts = linspace(cfg, 0.2, 0.95, 16)?;
            if pts.iter().any(|r| !(*r > 0.0 && *r < 1.0)) {
                return Err(Failure::config("flat torus scan needs 0 < r1 < 1"));
            }
            let rows = pts
                .into_iter()
                .map(|r1| {
                    let r = ((1.0 - r1 * r1) / 2.0).sqrt();
                    (fmt(r1), FamilySpec::FlatTorus { r: [r1, r, r] })
                })
                .collect();
            ("r1".into(), rows)
        }
        FamilySpec::Whitney { .. } => {
            if param.is_some_and(|p| p != "t") {
                return Err(Failure::config("whitney scans vary `t`"));
            }
            let rows = linspace(cfg, 0.0, 2.0, 9)?.into_iter().map(|t| (fmt(t), FamilySpec::Whitney { t })).collect();
            ("t".into(), rows)
        }
        FamilySpec::PhiAb { .. } | FamilySpec::Psi { .. } => {
            let n = cfg.settings.parse::<usize>("samples")?.unwrap_or(5);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut c = || C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let rows = (0..n)
                .map(|_| {
                    let (a, b) = (c(), c());
                    let spec = match base {
                        FamilySpec::PhiAb { .. } => FamilySpec::PhiAb { a, b },
                        _ => FamilySpec::Psi { a, b },
                    };
                    let label = format!(
                        "{};{}",
                        cp2_willmore::suites::fmt_complex(a),
                        cp2_willmore::suites::fmt_complex(b)
                    );
                    (label, spec)
                })
                .collect();
            ("a;b".into(), rows)
        }
        other => ("none".into(), vec![(String::new(), other)]),
    })
}

pub fn scan(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let (param, points) = scan_points(cfg)?;
    let mut rows = Vec::new();
    for (label, spec) in points {
        let mut row = ScanRow {
            surface: spec.name().into(),
            param: param.clone(),
            value: label,
            ok: false,
            error: None,
            area: None,
            w: None,
            wplus: None,
            wminus: None,
            wminus_error: None,
            degree_d: None,
            chi: None,
            chi_perp: None,
        };
        let res = (|| -> GeomResult<InvariantReport> {
            let spec = spec.validated()?;
            let s = make_surface(spec)?;
            let (u, v) = cfg.grid_for(spec.domain());
            invariant_report(&s, &build_grid(spec.domain(), u, v)?)
        })();
        match res {
            Ok(r) => {
                row.ok = true;
                row.area = Some(r.area.value);
                row.w = Some(r.w.value);
                row.wplus = Some(r.wplus.value);
                row.wminus = Some(r.wminus.value);
                row.wminus_error = Some(r.wminus.error);
                row.degree_d = r.value("degree_d");
                row.chi = r.value("chi");
                row.chi_perp = r.value("chi_perp");
            }
            Err(e) => row.error = Some(e.to_string()),
        }
        rows.push(row);
    }
    let failed = rows.iter().filter(|r| !r.ok).count();
    let text = match cfg.format {
        Format::Json => render::json(&json!({ "param": param, "rows": rows }))?,
        Format::Csv | Format::Text => {
            let header = ["surface", param.as_str(), "area", "W", "Wplus", "Wminus", "Wminus_error", "degree_d", "chi", "chi_perp", "error"];
            let o = |x: Option<f64>| x.map(render::num).unwrap_or_default();
            let cells = rows.iter().map(|r| {
                vec![
                    r.surface.clone(),
                    r.value.clone(),
                    o(r.area),
                    o(r.w),
                    o(r.wplus),
                    o(r.wminus),
                    o(r.wminus_error),
                    o(r.degree_d),
                    o(r.chi),
                    o(r.chi_perp),
                    r.error.clone().unwrap_or_default(),
                ]
            });
            if cfg.format == Format::Csv {
                render::csv_rows(&header, cells)?
            } else {
                render::table(&header, cells)
            }
        }
    };
    Ok(Outcome {
        text,
        code: 0,
        message: (failed > 0).then(|| format!("{failed} scan rows failed")),
    })
}

pub const DEFAULT_STARTS: [[f64; 3]; 3] = [[0.5, 0.3, 0.2], [0.2, 0.2, 0.6], [0.7, 0.2, 0.1]];

pub fn optimizer_starts(cfg: &RunConfig) -> Result<Vec<[f64; 3]>, Failure> {
    match cfg.settings.get("start") {
        None => Ok(DEFAULT_STARTS.to_vec()),
        Some(s) => s.split(';').filter(|x| !x.trim().is_empty()).map(parse_triple).collect(),
    }
}

pub fn optimize(cfg: &RunConfig) -> Result<Outcome, Failure> {
    if cfg.settings.get("surface").is_some() {
        match cfg.surface()? {
            FamilySpec::FlatTorus { .. } | FamilySpec::Clifford => {}
            other => return Err(Failure::config(format!("optimize works on flat tori, not {}", other.name()))),
        }
    }
    let starts = optimizer_starts(cfg)?;
    let runs: Vec<TorusOptimum> = starts
        .iter()
        .map(|s| optimize_flat_torus(*s, cfg.simplex_step, cfg.optimizer))
        .collect::<GeomResult<_>>()?;
    let target = 8.0 * PI * PI / (3.0 * 3f64.sqrt());
    let best = runs
        .iter()
        .min_by(|a, b| a.min_wminus.total_cmp(&b.min_wminus))
        .expect("at least one start");
    let all_converged = runs.iter().all(|r| r.converged);
    let text = match cfg.format {
        Format::Json => render::json(&json!({
            "family": "flat_torus",
            "target": { "argmin": [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], "min_wminus": target },
            "best": { "argmin": best.argmin, "min_wminus": best.min_wminus },
            "converged": all_converged,
            "runs": runs,
        }))?,
        Format::Csv | Format::Text => {
            let header = ["start", "argmin", "min_wminus", "start_wminus", "iterations", "evaluations", "converged"];
            let tr = |w: &[f64; 3]| format!("{:.9},{:.9},{:.9}", w[0], w[1], w[2]);
            let cells = runs.iter().map(|r| {
                vec![
                    tr(&r.start),
                    tr(&r.argmin),
                    render::num(r.min_wminus),
                    render::num(r.start_wminus),
                    r.iterations.to_string(),
                    r.evaluations.to_string(),
                    r.converged.to_string(),
                ]
            });
            if cfg.format == Format::Csv {
                render::csv_rows(&header, cells)?
            } else {
                let mut s = render::table(&header, cells);
                s += &format!("\ntarget 8π²/(3√3) = {}\n", render::num(target));
                s
            }
        }
    };
    Ok(Outcome {
        text,
        code: if all_converged { 0 } else { 4 },
        message: (!all_converged).then(|| {
            format!(
                "optimizer did not converge within {} iterations; best so far W⁻ = {} at {:?}",
                cfg.optimizer.max_iter, best.min_wminus, best.argmin
            )
        }),
    })
}
