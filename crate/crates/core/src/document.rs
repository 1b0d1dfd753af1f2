//! The animated application state: a JSON-like value tree addressed by
//! dot-separated property paths.

use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use thiserror::Error;

pub const PATH_SEPARATOR: char = '.';

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocumentError {
    #[error("invalid property path `{text}`: {reason}")]
    PathSyntax { text: String, reason: &'static str },
    #[error("path `{path}` not found: no key `{segment}`")]
    PathNotFound { path: String, segment: String },
    #[error("type mismatch at `{path}`: expected {expected}, found {found}")]
    TypeMismatch {
        path: String,
        expected: &'static str,
        found: &'static str,
    },
    #[error("number at `{path}` is not finite")]
    NonFinite { path: String },
    #[error("object at `{path}` has an empty key")]
    EmptyKey { path: String },
    #[error("document root must be an object, found {found}")]
    RootNotObject { found: &'static str },
    #[error("invalid document JSON: {0}")]
    Json(String),
}

/// A finite 64-bit float.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Finite(f64);

impl Finite {
    pub fn new(x: f64) -> Option<Finite> {
        x.is_finite().then_some(Finite(x))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl From<Finite> for f64 {
    fn from(x: Finite) -> f64 {
        x.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(Finite),
    Boolean(bool),
    Text(String),
    Object(IndexMap<String, Value>),
}

impl Value {
    /// Builds a number leaf, rejecting NaN and infinities.
    pub fn number(x: f64) -> Result<Value, DocumentError> {
        Finite::new(x)
            .map(Value::Number)
            .ok_or_else(|| DocumentError::NonFinite { path: String::new() })
    }

    pub fn text(s: impl Into<String>) -> Value {
        Value::Text(s.into())
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Value::Number(_) => "number",
            Value::Boolean(_) => "boolean",
            Value::Text(_) => "text",
            Value::Object(_) => "object",
        }
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Value::Number(x) => Some(x.get()),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Boolean(b) => Some(*b),
            _ => None,
        }
    }

    fn same_variant(&self, other: &Value) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(other)
    }

    /// Converts from JSON. Arrays and nulls have no counterpart.
    pub fn from_json(json: &serde_json::Value) -> Result<Value, DocumentError> {
        from_json_at(json, &mut Vec::new())
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Number(x) => serde_json::Number::from_f64(x.get())
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
            Value::Boolean(b) => serde_json::Value::Bool(*b),
            Value::Text(s) => serde_json::Value::String(s.clone()),
            Value::Object(map) => {
                serde_json::Value::Object(map.iter().map(|(k, v)| (k.clone(), v.to_json())).collect())
            }
        }
    }
}

fn from_json_at(json: &serde_json::Value, at: &mut Vec<String>) -> Result<Value, DocumentError> {
    use serde_json::Value as J;
    match json {
        J::Bool(b) => Ok(Value::Boolean(*b)),
        J::String(s) => Ok(Value::Text(s.clone())),
        J::Number(n) => n
            .as_f64()
            .and_then(Finite::new)
            .map(Value::Number)
            .ok_or_else(|| DocumentError::NonFinite { path: at.join(".") }),
        J::Object(map) => {
            let mut out = IndexMap::with_capacity(map.len());
            for (key, child) in map {
                if key.is_empty() {
                    return Err(DocumentError::EmptyKey { path: at.join(".") });
                }
                at.push(key.clone());
                let v = from_json_at(child, at)?;
                at.pop();
                out.insert(key.clone(), v);
            }
            Ok(Value::Object(out))
        }
        J::Null => Err(DocumentError::Json(format!(
            "null is not a supported value (at `{}`)",
            at.join(".")
        ))),
        J::Array(_) => Err(DocumentError::Json(format!(
            "arrays are not supported (at `{}`)",
            at.join(".")
        ))),
    }
}

/// Dot-separated address of one leaf, e.g. `navbar.underline1.width`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PropertyPath {
    segments: Vec<String>,
}

impl PropertyPath {
    pub fn parse(text: &str) -> Result<PropertyPath, DocumentError> {
        if text.is_empty() {
            return Err(DocumentError::PathSyntax {
                text: text.to_owned(),
                reason: "path is empty",
            });
        }
        let segments: Vec<String> = text.split(PATH_SEPARATOR).map(str::to_owned).collect();
        if segments.iter().any(String::is_empty) {
            return Err(DocumentError::PathSyntax {
                text: text.to_owned(),
                reason: "empty segment",
            });
        }
        Ok(PropertyPath { segments })
    }

    pub fn segments(&self) -> &[String] {
        &self.segments
    }
}

impl FromStr for PropertyPath {
    type Err = DocumentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PropertyPath::parse(s)
    }
}

impl fmt::Display for PropertyPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.segments.join("."))
    }
}

/// Application state. The root is always an object.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    root: IndexMap<String, Value>,
}

impl Document {
    pub fn new(root: Value) -> Result<Document, DocumentError> {
        match root {
            Value::Object(map) => {
                validate(&map, &mut Vec::new())?;
                Ok(Document { root: map })
            }
            other => Err(DocumentError::RootNotObject {
                found: other.kind_name(),
            }),
        }
    }

    pub fn from_json(json: &serde_json::Value) -> Result<Document, DocumentError> {
        Document::new(Value::from_json(json)?)
    }

    pub fn from_json_str(text: &str) -> Result<Document, DocumentError> {
        let json: serde_json::Value =
            serde_json::from_str(text).map_err(|e| DocumentError::Json(e.to_string()))?;
        Document::from_json(&json)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Object(self.root.iter().map(|(k, v)| (k.clone(), v.to_json())).collect())
    }

    pub fn root(&self) -> &IndexMap<String, Value> {
        &self.root
    }

    pub fn resolve(&self, path: &PropertyPath) -> Result<&Value, DocumentError> {
        let mut map = &self.root;
        let (last, init) = path.segments.split_last().expect("paths are non-empty");
        for seg in init {
            match map.get(seg) {
                Some(Value::Object(inner)) => map = inner,
                _ => return Err(not_found(path, seg)),
            }
        }
        map.get(last).ok_or_else(|| not_found(path, last))
    }

    pub fn resolve_number(&self, path: &PropertyPath) -> Result<f64, DocumentError> {
        let v = self.resolve(path)?;
        v.as_number().ok_or_else(|| DocumentError::TypeMismatch {
            path: path.to_string(),
            expected: "number",
            found: v.kind_name(),
        })
    }

    /// Returns a copy with the leaf at `path` replaced by `value`. Never
    /// creates structure; the new value must have the old leaf's variant.
    pub fn write(&self, path: &PropertyPath, value: Value) -> Result<Document, DocumentError> {
        let mut next = self.clone();
        next.write_in_place(path, value)?;
        Ok(next)
    }

    pub(crate) fn write_in_place(&mut self, path: &PropertyPath, value: Value) -> Result<(), DocumentError> {
        if let Value::Object(map) = &value {
            validate(map, &mut path.segments.clone())?;
        }
        let mut map = &mut self.root;
        let (last, init) = path.segments.split_last().expect("paths are non-empty");
        for seg in init {
            match map.get_mut(seg) {
                Some(Value::Object(inner)) => map = inner,
                _ => return Err(not_found(path, seg)),
            }
        }
        let slot = map.get_mut(last).ok_or_else(|| not_found(path, last))?;
        if !slot.same_variant(&value) {
            return Err(DocumentError::TypeMismatch {
                path: path.to_string(),
                expected: slot.kind_name(),
                found: value.kind_name(),
            });
        }
        *slot = value;
        Ok(())
    }
}

fn not_found(path: &PropertyPath, segment: &str) -> DocumentError {
    DocumentError::PathNotFound {
        path: path.to_string(),
        segment: segment.to_owned(),
    }
}

fn validate(map: &IndexMap<String, Value>, at: &mut Vec<String>) -> Result<(), DocumentError> {
    for (key, v) in map {
        if key.is_empty() {
            return Err(DocumentError::EmptyKey { path: at.join(".") });
        }
        if let Value::Object(inner) = v {
            at.push(key.clone());
            validate(inner, at)?;
            at.pop();
        }
    }
    Ok(())
}
