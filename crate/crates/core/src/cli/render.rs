use serde::Serialize;
use serde_json::Value;

use super::{Failure, Format, ReportDocument, EXIT_INTERNAL};
use crate::experiments::RowReport;

fn to_value<T: Serialize>(v: &T) -> Result<Value, Failure> {
    serde_json::to_value(v).map_err(|e| Failure {
        code: EXIT_INTERNAL,
        message: format!("serialization failed: {e}"),
    })
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// `path<TAB>value` for every leaf.
fn flatten(prefix: &str, v: &Value, out: &mut String) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) if !map.is_empty() => {
            for (k, x) in map {
                flatten(&join(k), x, out);
            }
        }
        Value::Array(xs) if !xs.is_empty() => {
            for (i, x) in xs.iter().enumerate() {
                flatten(&join(&i.to_string()), x, out);
            }
        }
        leaf => {
            out.push_str(prefix);
            out.push('\t');
            out.push_str(&scalar(leaf));
            out.push('\n');
        }
    }
}

pub(super) fn value<T: Serialize>(v: &T, format: Format) -> Result<String, Failure> {
    let v = to_value(v)?;
    Ok(match format {
        Format::Json => format!("{v}\n"),
        Format::Pretty => format!("{v:#}\n"),
        Format::Tsv => {
            let mut s = String::new();
            flatten("", &v, &mut s);
            s
        }
    })
}

/// One JSON document per item in `json` format.
pub(super) fn lines<T: Serialize>(items: &[T], format: Format) -> Result<String, Failure> {
    let mut s = String::new();
    for (i, item) in items.iter().enumerate() {
        match format {
            Format::Tsv if items.len() > 1 => flatten(&i.to_string(), &to_value(item)?, &mut s),
            _ => s.push_str(&value(item, format)?),
        }
    }
    Ok(s)
}

const COLUMNS: [&str; 9] = [
    "fibre",
    "status",
    "ell",
    "upper",
    "lower",
    "class",
    "stabilized",
    "exponent",
    "wall_ms",
];

fn cells(r: &RowReport) -> [String; 9] {
    let opt = |x: Option<String>| x.unwrap_or_else(|| "-".into());
    let mut fibre = r.config.fibre.clone();
    if r.config.phi_injective {
        fibre.push_str(" +phi");
    }
    let classes: Vec<String> = r
        .class
        .iter()
        .map(|c| {
            format!(
                "d{}:{}",
                c.field_degree,
                opt(c.class.map(|x| x.to_string()))
            )
        })
        .collect();
    let exponent = match (&r.exponent, &r.borel) {
        (Some(e), _) => Some(e.result.max_order_exponent.to_string()),
        (None, Some(b)) => Some(format!("{} (expected {})", b.exponent, b.expected)),
        _ => None,
    };
    [
        fibre,
        r.status.to_string(),
        opt(r.prediction.as_ref().map(|p| p.ell.to_string())),
        opt(r
            .prediction
            .as_ref()
            .map(|p| p.class_bounds.upper.to_string())),
        opt(r
            .prediction
            .as_ref()
            .map(|p| p.class_bounds.witness_lower.to_string())),
        if classes.is_empty() {
            "-".into()
        } else {
            classes.join(",")
        },
        opt(r.stabilized.map(|b| b.to_string())),
        opt(exponent),
        opt(r.wall_ms.map(|w| w.to_string())),
    ]
}

pub(super) fn report(doc: &ReportDocument, format: Format) -> Result<String, Failure> {
    match format {
        Format::Json => value(doc, format),
        Format::Tsv => {
            let mut s = COLUMNS.join("\t");
            s.push('\n');
            for r in &doc.rows {
                s.push_str(&cells(r).join("\t"));
                s.push('\n');
            }
            Ok(s)
        }
        Format::Pretty => {
            let rows: Vec<[String; 9]> = doc.rows.iter().map(cells).collect();
            let mut widths: Vec<usize> = COLUMNS.iter().map(|c| c.len()).collect();
            for r in &rows {
                for (w, c) in widths.iter_mut().zip(r) {
                    *w = (*w).max(c.chars().count());
                }
            }
            let mut s = String::new();
            let mut push = |cols: &mut dyn Iterator<Item = &str>| {
                let line: Vec<String> = cols
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:<w$}", w = *w))
                    .collect();
                s.push_str(line.join("  ").trim_end());
                s.push('\n');
            };
            push(&mut COLUMNS.iter().copied());
            for r in &rows {
                push(&mut r.iter().map(String::as_str));
            }
            let m = &doc.summary;
            s.push_str(&format!(
                "\n{} rows: {} ok, {} hypothesis-unmet, {} budget-exceeded, {} inconclusive, {} mismatch\n",
                m.rows, m.ok, m.hypothesis_unmet, m.budget_exceeded, m.inconclusive, m.mismatch
            ));
            Ok(s)
        }
    }
}
