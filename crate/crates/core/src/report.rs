//! Canonical JSON reports.
//!
//! Reports are rendered with sorted object keys and every float in
//! `{:.16e}` scientific notation (17 significant digits round-trips
//! f64 exactly), so identical runs produce byte-identical files. A
//! small schema validator covers the subset of JSON Schema the shipped
//! schemas use: `type`, `properties`, `required`, `items`, `enum`,
//! `additionalProperties`.

use serde::Serialize;
use serde_json::Value;

use crate::{Error, Result};

/// Serializes into a `serde_json::Value` (object keys end up sorted:
/// the default map is a BTreeMap).
pub fn to_value<T: Serialize>(t: &T) -> Result<Value> {
    serde_json::to_value(t).map_err(|e| Error::InvalidParameter(format!("serialization failed: {e}")))
}

/// Canonical rendering: sorted keys, two-space indent, floats in
/// `{:.16e}` form, trailing newline.
pub fn to_json17(value: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, value, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, value: &Value, indent: usize) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                // as_f64 is total on serde_json numbers.
                let f = n.as_f64().unwrap();
                out.push_str(&format!("{f:.16e}"));
            }
        }
        Value::String(s) => write_escaped(out, s),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                push_indent(out, indent + 1);
                write_value(out, item, indent + 1);
            }
            out.push('\n');
            push_indent(out, indent);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push('{');
            for (i, (k, v)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                push_indent(out, indent + 1);
                write_escaped(out, k);
                out.push_str(": ");
                write_value(out, v, indent + 1);
            }
            out.push('\n');
            push_indent(out, indent);
            out.push('}');
        }
    }
}

fn push_indent(out: &mut String, levels: usize) {
    for _ in 0..levels {
        out.push_str("  ");
    }
}

fn write_escaped(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
}

/// Validates `value` against the schema subset; errors carry the JSON
/// path of the first few violations.
pub fn validate_schema(value: &Value, schema: &Value) -> Result<()> {
    let mut errors = Vec::new();
    check(value, schema, "$", &mut errors);
    if errors.is_empty() {
        Ok(())
    } else {
        errors.truncate(8);
        Err(Error::InvalidParameter(format!("schema violations: {}", errors.join("; "))))
    }
}

fn check(value: &Value, schema: &Value, path: &str, errors: &mut Vec<String>) {
    let Some(obj) = schema.as_object() else {
        errors.push(format!("{path}: schema node is not an object"));
        return;
    };
    if let Some(ty) = obj.get("type") {
        let allowed: Vec<&str> = match ty {
            Value::String(s) => vec![s.as_str()],
            Value::Array(items) => items.iter().filter_map(|v| v.as_str()).collect(),
            _ => vec![],
        };
        if !allowed.iter().any(|t| type_matches(value, t)) {
            errors.push(format!("{path}: expected type {allowed:?}, got {}", type_name(value)));
            return;
        }
    }
    if let Some(options) = obj.get("enum").and_then(Value::as_array) {
        if !options.contains(value) {
            errors.push(format!("{path}: value not in enum"));
        }
    }
    if let Some(required) = obj.get("required").and_then(Value::as_array) {
        if let Some(map) = value.as_object() {
            for key in required.iter().filter_map(Value::as_str) {
                if !map.contains_key(key) {
                    errors.push(format!("{path}: missing required key \"{key}\""));
                }
            }
        }
    }
    if let Some(map) = value.as_object() {
        let props = obj.get("properties").and_then(Value::as_object);
        for (key, sub) in props.into_iter().flatten() {
            if let Some(child) = map.get(key) {
                check(child, sub, &format!("{path}.{key}"), errors);
            }
        }
        match obj.get("additionalProperties") {
            Some(Value::Bool(false)) => {
                for key in map.keys() {
                    if props.is_none_or(|p| !p.contains_key(key)) {
                        errors.push(format!("{path}: unexpected key \"{key}\""));
                    }
                }
            }
            Some(extra @ Value::Object(_)) => {
                for (key, child) in map {
                    if props.is_none_or(|p| !p.contains_key(key)) {
                        check(child, extra, &format!("{path}.{key}"), errors);
                    }
                }
            }
            _ => {}
        }
    }
    if let (Some(items), Some(arr)) = (obj.get("items"), value.as_array()) {
        for (i, child) in arr.iter().enumerate() {
            check(child, items, &format!("{path}[{i}]"), errors);
        }
    }
}

fn type_matches(value: &Value, ty: &str) -> bool {
    match ty {
        "object" => value.is_object(),
        "array" => value.is_array(),
        "string" => value.is_string(),
        "boolean" => value.is_boolean(),
        "null" => value.is_null(),
        "number" => value.is_number(),
        "integer" => {
            value.as_i64().is_some()
                || value.as_u64().is_some()
                || value.as_f64().is_some_and(|f| f.is_finite() && f.fract() == 0.0)
        }
        _ => false,
    }
}

fn type_name(value: &Value) -> &'static str {
    match value {
        Value::Null => "null",
        Value::Bool(_) => "boolean",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}
