use serde::Serialize;
use serde_json::{json, Value};

use cp2_willmore::suites::Check;

use crate::Failure;

pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == 0.0 || (1e-3..1e6).contains(&x.abs()) {
        format!("{x:.12}").trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{x:.6e}")
    }
}

pub fn json<T: Serialize>(v: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Failure::numerical(format!("cannot serialize report: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// The compact check record of an evaluation report.
pub fn check_json(c: &Check) -> Value {
    let mut v = json!({
        "id": c.id,
        "status": c.status,
        "computed": c.computed,
        "expected": c.expected,
        "tol": c.tol,
    });
    if let Some(n) = &c.note {
        v["note"] = json!(n);
    }
    v
}

pub fn csv_rows<I>(header: &[&str], rows: I) -> Result<String, Failure>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::numerical(format!("cannot write csv: {e}"));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::numerical(format!("cannot write csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Failure::numerical(e.to_string()))
}

/// Left-aligned columns separated by two spaces.
pub fn table<I>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut all: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
    all.extend(rows);
    let n = header.len();
    let widths: Vec<usize> = (0..n)
        .map(|k| all.iter().map(|r| r.get(k).map_or(0, |c| c.chars().count())).max().unwrap_or(0))
        .collect();
    let mut s = String::new();
    for r in &all {
        let line: Vec<String> = (0..n)
            .map(|k| {
                let c = r.get(k).map(String::as_str).unwrap_or("");
                format!("{c:<w$}", w = widths[k])
            })
            .collect();
        s += line.join("  ").trim_end();
        s.push('\n');
    }
    s
}

pub fn checks_table(checks: &[Check]) -> String {
    table(
        &["status", "id", "basis", "computed", "expected", "tol", "note"],
        checks.iter().map(|c| {
            vec![
                c.status.to_string(),
                c.id.clone(),
                c.basis.clone(),
                num(c.computed),
                format!("{} {}", c.relation, num(c.expected)),
                num(c.tol),
                c.note.clone().unwrap_or_default(),
            ]
        }),
    )
}
