#![allow(dead_code)]

use serde_json::Value;

pub const SCHEMA: &str = include_str!("../../schema/report.schema.json");

/// Runs the CLI in-process with no `WEILRAD_BUDGET` override.
pub fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["weilrad"];
    full.extend_from_slice(args);
    let code = weilrad::cli::run_with_env(full, None, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

pub fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap_or_else(|e| panic!("not JSON ({e}): {text}"))
}

/// Validator for the draft-07 subset used by the shipped schema: `$ref`
/// into `definitions`, `anyOf`, `type`, `enum`, `required`, `properties`,
/// `additionalProperties: false`, `items`, `minimum` and the digits-only
/// `pattern`.
pub struct Schema {
    root: Value,
}

impl Schema {
    pub fn shipped() -> Self {
        Self { root: json(SCHEMA) }
    }

    pub fn validate(&self, doc: &Value) -> Result<(), String> {
        self.check(&self.root, doc, "$")
    }

    fn resolve<'a>(&'a self, reference: &str) -> &'a Value {
        let name = reference
            .strip_prefix("#/definitions/")
            .unwrap_or_else(|| panic!("unsupported $ref {reference}"));
        &self.root["definitions"][name]
    }

    fn type_matches(t: &str, v: &Value) -> bool {
        match t {
            "null" => v.is_null(),
            "boolean" => v.is_boolean(),
            "integer" => v.is_i64() || v.is_u64(),
            "number" => v.is_number(),
            "string" => v.is_string(),
            "array" => v.is_array(),
            "object" => v.is_object(),
            other => panic!("unknown type {other}"),
        }
    }

    fn check(&self, s: &Value, v: &Value, path: &str) -> Result<(), String> {
        if let Some(r) = s.get("$ref").and_then(Value::as_str) {
            return self.check(self.resolve(r), v, path);
        }
        if let Some(alts) = s.get("anyOf").and_then(Value::as_array) {
            let errors: Vec<String> = alts
                .iter()
                .filter_map(|a| self.check(a, v, path).err())
                .collect();
            if errors.len() == alts.len() {
                return Err(format!(
                    "{path}: no alternative matched [{}]",
                    errors.join(" | ")
                ));
            }
        }
        if let Some(t) = s.get("type") {
            let ok = match t {
                Value::String(t) => Self::type_matches(t, v),
                Value::Array(ts) => ts
                    .iter()
                    .any(|t| Self::type_matches(t.as_str().unwrap(), v)),
                _ => panic!("bad type keyword"),
            };
            if !ok {
                return Err(format!("{path}: expected type {t}, got {v}"));
            }
        }
        if let Some(options) = s.get("enum").and_then(Value::as_array) {
            if !options.contains(v) {
                return Err(format!("{path}: {v} not in {options:?}"));
            }
        }
        if let (Some(pat), Some(text)) = (s.get("pattern").and_then(Value::as_str), v.as_str()) {
            assert_eq!(pat, "^[0-9]+$", "unsupported pattern");
            if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
                return Err(format!("{path}: `{text}` is not a decimal string"));
            }
        }
        if let (Some(min), Some(x)) = (s.get("minimum").and_then(Value::as_f64), v.as_f64()) {
            if x < min {
                return Err(format!("{path}: {x} below minimum {min}"));
            }
        }
        if let Some(obj) = v.as_object() {
            if let Some(req) = s.get("required").and_then(Value::as_array) {
                for k in req {
                    let k = k.as_str().unwrap();
                    if !obj.contains_key(k) {
                        return Err(format!("{path}: missing `{k}`"));
                    }
                }
            }
            let props = s.get("properties").and_then(Value::as_object);
            for (k, x) in obj {
                match props.and_then(|p| p.get(k)) {
                    Some(ps) => self.check(ps, x, &format!("{path}.{k}"))?,
                    None if s.get("additionalProperties") == Some(&Value::Bool(false)) => {
                        return Err(format!("{path}: unexpected `{k}`"));
                    }
                    None => {}
                }
            }
        }
        if let (Some(items), Some(xs)) = (s.get("items"), v.as_array()) {
            for (i, x) in xs.iter().enumerate() {
                self.check(items, x, &format!("{path}[{i}]"))?;
            }
        }
        Ok(())
    }
}
