//! JSON documents for trees, used both for machine output and for hand-written
//! trees. Omitted weights under a pick-one node share the mass left by the
//! specified siblings; elsewhere they default to 1.

use std::collections::BTreeMap;

use serde_json::{Map, Value};
use thiserror::Error;

use super::{validate, East, EastNode, NodeKind, Violation};

pub const EAST_DOCUMENT_KINDS: [&str; 5] = ["order", "pickone", "exchangeable", "fixed", "entity"];

const NODE_FIELDS: [&str; 6] = ["kind", "weight", "dropout", "children", "dictionary", "slot"];

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("malformed document: {0}")]
    Json(String),
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("tree is invalid: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

fn schema(path: &str, message: impl Into<String>) -> DocumentError {
    DocumentError::Schema {
        path: path.to_string(),
        message: message.into(),
    }
}

impl East {
    pub fn to_json_value(&self) -> Value {
        let mut doc = Map::new();
        doc.insert("intent".into(), Value::String(self.intent.clone()));
        doc.insert("root".into(), node_to_value(&self.root));
        Value::Object(doc)
    }

    /// Pretty-printed document with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(&self.to_json_value()).expect("tree serializes");
        out.push('\n');
        out
    }

    /// Parses and validates a document.
    pub fn from_json(text: &str) -> Result<East, DocumentError> {
        let tree = Self::from_json_unchecked(text)?;
        let violations = validate(&tree);
        if violations.is_empty() {
            Ok(tree)
        } else {
            Err(DocumentError::Invalid(violations))
        }
    }

    /// Parses a document, checking only its schema.
    pub fn from_json_unchecked(text: &str) -> Result<East, DocumentError> {
        let value: Value = serde_json::from_str(text).map_err(|e| DocumentError::Json(e.to_string()))?;
        Self::from_json_value(&value)
    }

    pub fn from_json_value(value: &Value) -> Result<East, DocumentError> {
        let doc = value.as_object().ok_or_else(|| schema("$", "expected an object"))?;
        for key in doc.keys() {
            if key != "intent" && key != "root" {
                return Err(schema("$", format!("unknown field {key:?}")));
            }
        }
        let intent = doc
            .get("intent")
            .and_then(Value::as_str)
            .ok_or_else(|| schema("$", "missing string field \"intent\""))?;
        let root = doc.get("root").ok_or_else(|| schema("$", "missing field \"root\""))?;
        let mut root = node_from_value(root, "root")?;
        if root.weight.is_nan() {
            root.weight = 1.0;
        }
        Ok(East::new(intent, root))
    }
}

fn node_to_value(node: &EastNode) -> Value {
    let mut obj = Map::new();
    obj.insert("kind".into(), Value::String(node.kind.as_str().into()));
    obj.insert("weight".into(), number(node.weight));
    if let Some(d) = node.dropout {
        obj.insert("dropout".into(), number(d));
    }
    if node.kind.is_control() || !node.children.is_empty() {
        obj.insert(
            "children".into(),
            Value::Array(node.children.iter().map(node_to_value).collect()),
        );
    }
    if node.kind == NodeKind::FixedContent || !node.dictionary.is_empty() {
        obj.insert(
            "dictionary".into(),
            Value::Object(
                node.dictionary
                    .iter()
                    .map(|(p, c)| (p.clone(), Value::from(*c)))
                    .collect(),
            ),
        );
    }
    if let Some(slot) = &node.slot {
        obj.insert("slot".into(), Value::String(slot.clone()));
    }
    Value::Object(obj)
}

fn number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

// Weight is NaN when the document leaves it out; the parent fills it in.
fn node_from_value(value: &Value, path: &str) -> Result<EastNode, DocumentError> {
    let obj = value.as_object().ok_or_else(|| schema(path, "expected an object"))?;
    for key in obj.keys() {
        if !NODE_FIELDS.contains(&key.as_str()) {
            return Err(schema(path, format!("unknown field {key:?}")));
        }
    }
    let kind = match obj.get("kind").and_then(Value::as_str) {
        Some("order") => NodeKind::Order,
        Some("pickone") => NodeKind::PickOne,
        Some("exchangeable") => NodeKind::Exchangeable,
        Some("fixed") => NodeKind::FixedContent,
        Some("entity") => NodeKind::EntityContent,
        Some(other) => return Err(schema(path, format!("unknown node kind {other:?}"))),
        None => return Err(schema(path, "missing string field \"kind\"")),
    };
    let weight = optional_number(obj, "weight", path)?.unwrap_or(f64::NAN);
    let dropout = optional_number(obj, "dropout", path)?;

    let mut children = Vec::new();
    if let Some(raw) = obj.get("children") {
        let items = raw
            .as_array()
            .ok_or_else(|| schema(path, "\"children\" must be an array"))?;
        for (i, item) in items.iter().enumerate() {
            children.push(node_from_value(item, &format!("{path}/{i}"))?);
        }
    }
    fill_weights(kind, &mut children);

    let mut dictionary = BTreeMap::new();
    if let Some(raw) = obj.get("dictionary") {
        let entries = raw
            .as_object()
            .ok_or_else(|| schema(path, "\"dictionary\" must be an object"))?;
        for (phrase, count) in entries {
            let count = count
                .as_u64()
                .ok_or_else(|| schema(path, format!("count of {phrase:?} must be a non-negative integer")))?;
            dictionary.insert(phrase.clone(), count);
        }
    }

    let slot = match obj.get("slot") {
        None => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(schema(path, "\"slot\" must be a string")),
    };

    Ok(EastNode {
        kind,
        weight,
        dropout,
        children,
        dictionary,
        slot,
    })
}

fn optional_number(obj: &Map<String, Value>, key: &str, path: &str) -> Result<Option<f64>, DocumentError> {
    match obj.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_f64()
            .map(Some)
            .ok_or_else(|| schema(path, format!("\"{key}\" must be a number"))),
    }
}

fn fill_weights(parent: NodeKind, children: &mut [EastNode]) {
    let unspecified = children.iter().filter(|c| c.weight.is_nan()).count();
    if unspecified == 0 {
        return;
    }
    let share = if parent == NodeKind::PickOne {
        let specified: f64 = children.iter().filter(|c| !c.weight.is_nan()).map(|c| c.weight).sum();
        (1.0 - specified) / unspecified as f64
    } else {
        1.0
    };
    for child in children.iter_mut().filter(|c| c.weight.is_nan()) {
        child.weight = share;
    }
}
