//! Minimal JSON Schema checker covering the subset used by
//! `docs/cli-json-schema.json`: type (incl. type arrays), enum, oneOf,
//! properties/required/additionalProperties, items, and `#/$defs/...` refs.

use serde_json::Value;

pub struct SchemaChecker {
    root: Value,
}

impl SchemaChecker {
    pub fn load() -> Self {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/cli-json-schema.json");
        let text = std::fs::read_to_string(path).expect("schema document present");
        SchemaChecker {
            root: serde_json::from_str(&text).expect("schema is valid JSON"),
        }
    }

    pub fn validate(&self, value: &Value) -> Result<(), String> {
        self.check(&self.root, value, "$")
    }

    fn resolve<'a>(&'a self, reference: &str) -> &'a Value {
        let mut cur = &self.root;
        for part in reference.trim_start_matches("#/").split('/') {
            cur = cur.get(part).unwrap_or_else(|| panic!("bad $ref {reference}"));
        }
        cur
    }

    fn check(&self, schema: &Value, value: &Value, path: &str) -> Result<(), String> {
        if let Some(reference) = schema.get("$ref").and_then(Value::as_str) {
            return self.check(self.resolve(reference), value, path);
        }
        if let Some(variants) = schema.get("oneOf").and_then(Value::as_array) {
            let mut matches = 0;
            for v in variants {
                if self.check(v, value, path).is_ok() {
                    matches += 1;
                }
            }
            if matches != 1 {
                return Err(format!("{path}: matched {matches} of oneOf variants"));
            }
            return Ok(());
        }
        if let Some(ty) = schema.get("type") {
            let allowed: Vec<&str> = match ty {
                Value::String(s) => vec![s.as_str()],
                Value::Array(a) => a.iter().filter_map(Value::as_str).collect(),
                _ => vec![],
            };
            let actual = match value {
                Value::Null => "null",
                Value::Bool(_) => "boolean",
                Value::Number(n) => {
                    if n.is_i64() || n.is_u64() {
                        "integer"
                    } else {
                        "number"
                    }
                }
                Value::String(_) => "string",
                Value::Array(_) => "array",
                Value::Object(_) => "object",
            };
            let ok = allowed.iter().any(|t| {
                *t == actual || (*t == "number" && actual == "integer")
            });
            if !ok {
                return Err(format!("{path}: expected type {allowed:?}, got {actual}"));
            }
        }
        if let Some(options) = schema.get("enum").and_then(Value::as_array) {
            if !options.contains(value) {
                return Err(format!("{path}: value {value} not in enum"));
            }
        }
        if let Value::Object(obj) = value {
            if let Some(props) = schema.get("properties").and_then(Value::as_object) {
                for (key, sub) in props {
                    if let Some(v) = obj.get(key) {
                        self.check(sub, v, &format!("{path}.{key}"))?;
                    }
                }
                if schema.get("additionalProperties") == Some(&Value::Bool(false)) {
                    for key in obj.keys() {
                        if !props.contains_key(key) {
                            return Err(format!("{path}: unexpected property {key}"));
                        }
                    }
                }
            }
            if let Some(required) = schema.get("required").and_then(Value::as_array) {
                for key in required.iter().filter_map(Value::as_str) {
                    if !obj.contains_key(key) {
                        return Err(format!("{path}: missing required property {key}"));
                    }
                }
            }
        }
        if let (Value::Array(items), Some(item_schema)) = (value, schema.get("items")) {
            for (i, v) in items.iter().enumerate() {
                self.check(item_schema, v, &format!("{path}[{i}]"))?;
            }
        }
        Ok(())
    }
}
