// SPDX-License-Identifier: Apache-2.0

//! Output envelopes, exact-rational serialization and atomic file writes.

use std::io::Write;
use std::path::Path;

use num::{BigRational, Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;

/// Fractional digits kept in the decimal rendering of an exact rational.
pub const DECIMAL_DIGITS: usize = 30;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Truncated decimal expansion of `q`, exact for integers.
pub fn decimal(q: &BigRational, digits: usize) -> String {
    let negative = q.is_negative();
    let abs = q.abs();
    let (int, mut rem) = (abs.numer() / abs.denom(), abs.numer() % abs.denom());
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    out.push_str(&int.to_string());
    if rem.is_zero() {
        return out;
    }
    out.push('.');
    let mut frac = String::new();
    for _ in 0..digits {
        if rem.is_zero() {
            break;
        }
        rem *= 10;
        frac.push_str(&(&rem / abs.denom()).to_string());
        rem = &rem % abs.denom();
    }
    out.push_str(&frac);
    out
}

/// Stores an exact value under `key` as its `num/den` string, with sibling
/// `{key}_decimal`, `{key}_num`, `{key}_den` and `{key}_float` fields.
pub fn put_exact(obj: &mut Value, key: &str, q: &BigRational) {
    obj[key] = json!(q.to_string());
    obj[format!("{key}_decimal")] = json!(decimal(q, DECIMAL_DIGITS));
    obj[format!("{key}_num")] = json!(q.numer().to_string());
    obj[format!("{key}_den")] = json!(q.denom().to_string());
    obj[format!("{key}_float")] = json!(fermicomm::magic::to_f64(q));
}

/// Provenance header followed by the subcommand result.
pub fn envelope<C: Serialize>(config: &C, seed: Option<u64>, result: Value) -> Value {
    json!({
        "provenance": {
            "tool": "fermicomm",
            "version": env!("CARGO_PKG_VERSION"),
            "config": config,
            "seed": seed,
        },
        "result": result,
    })
}

/// Leaf values of a JSON tree as `(dotted.path, value)` rows.
pub fn flatten(value: &Value) -> Vec<(String, String)> {
    fn walk(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
        let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
        match v {
            Value::Object(map) => {
                for (k, child) in map {
                    walk(&join(k), child, rows);
                }
            }
            Value::Array(items) => {
                for (i, child) in items.iter().enumerate() {
                    walk(&join(&i.to_string()), child, rows);
                }
            }
            Value::String(s) => rows.push((prefix.to_string(), s.clone())),
            Value::Null => rows.push((prefix.to_string(), String::new())),
            other => rows.push((prefix.to_string(), other.to_string())),
        }
    }
    let mut rows = Vec::new();
    walk("", value, &mut rows);
    rows
}

pub fn render(value: &Value, format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Json => {
            let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
            bytes.push(b'\n');
            Ok(bytes)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["key", "value"]).map_err(csv_err)?;
            for (k, v) in flatten(value) {
                w.write_record([k, v]).map_err(csv_err)?;
            }
            w.into_inner().map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

pub fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

/// Writes `bytes` to a temporary file next to `path` and renames it into
/// place, so a failed run never leaves a truncated file behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;

    #[test]
    fn decimal_expansions() {
        let q = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
        assert_eq!(decimal(&q(22, 1), 10), "22");
        assert_eq!(decimal(&q(1, 14), 8), "0.07142857");
        assert_eq!(decimal(&q(-1, 8), 10), "-0.125");
        assert_eq!(decimal(&q(57, 5), 10), "11.4");
    }

    #[test]
    fn exact_fields() {
        let mut v = json!({});
        put_exact(&mut v, "x", &BigRational::new(BigInt::from(2), BigInt::from(28)));
        assert_eq!(v["x"], "1/14");
        assert_eq!(v["x_num"], "1");
        assert_eq!(v["x_den"], "14");
        assert!(v["x_decimal"].as_str().unwrap().starts_with("0.0714285714"));
    }

    #[test]
    fn flatten_paths() {
        let v = json!({"a": {"b": [1, "x"]}, "c": null});
        let rows = flatten(&v);
        assert_eq!(rows, vec![("a.b.0".into(), "1".into()), ("a.b.1".into(), "x".into()), ("c".into(), String::new())]);
    }
}
