//! Helpers for walking JSON documents with precise error paths, and for
//! rendering exact values into reports.

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::rat::{format_rat, parse_rat, rat_to_f64, Rat};

pub fn obj<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| Error::parse(path, "expected an object"))
}

pub fn field<'a>(m: &'a Map<String, Value>, path: &str, key: &str) -> Result<&'a Value> {
    m.get(key)
        .ok_or_else(|| Error::parse(format!("{path}.{key}"), "missing field"))
}

pub fn arr<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::parse(path, "expected an array"))
}

pub fn string<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str()
        .ok_or_else(|| Error::parse(path, "expected a string"))
}

pub fn usize_field(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::parse(path, "expected a non-negative integer"))
}

/// Rationals are written as `"p/q"` strings or plain JSON integers.
pub fn rational(v: &Value, path: &str) -> Result<Rat> {
    match v {
        Value::String(s) => {
            parse_rat(s).ok_or_else(|| Error::parse(path, format!("bad rational `{s}`")))
        }
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(crate::rat::rat_i(i))
            } else {
                Err(Error::parse(
                    path,
                    "expected an integer or \"p/q\" string (floats are not exact)",
                ))
            }
        }
        _ => Err(Error::parse(path, "expected a rational")),
    }
}

pub fn rational_vec(v: &Value, path: &str) -> Result<Vec<Rat>> {
    let a = arr(v, path)?;
    a.iter()
        .enumerate()
        .map(|(i, x)| rational(x, &format!("{path}[{i}]")))
        .collect()
}

pub fn f64_field(v: &Value, path: &str) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| Error::parse(path, "expected a number"))
}

/// Render an exact rational as `{"exact": "p/q", "approx": <decimal>}`.
pub fn rat_json(x: &Rat) -> Value {
    let mut m = Map::new();
    m.insert("exact".into(), Value::String(format_rat(x)));
    m.insert(
        "approx".into(),
        serde_json::Number::from_f64(rat_to_f64(x))
            .map(Value::Number)
            .unwrap_or(Value::Null),
    );
    Value::Object(m)
}

pub fn f64_json(x: f64) -> Value {
    let mut m = Map::new();
    m.insert(
        "approx".into(),
        serde_json::Number::from_f64(x)
            .map(Value::Number)
            .unwrap_or(Value::Null),
    );
    Value::Object(m)
}
