use std::collections::BTreeSet;
use std::fmt;

use super::{East, EastNode, NodeKind};

const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// One broken invariant, located by a node path such as `root/1/0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// Checks every structural invariant; an empty result means the tree is valid.
pub fn validate(tree: &East) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut report = |path: &str, message: String| {
        out.push(Violation {
            path: path.to_string(),
            message,
        })
    };
    if tree.intent.trim().is_empty() {
        report("root", "intent label is empty".into());
    }
    if !matches!(tree.root.kind, NodeKind::Order | NodeKind::PickOne) {
        report(
            "root",
            format!("root must be an order or pickone node, found {}", tree.root.kind),
        );
    }
    check_node(&tree.root, "root", &mut report);
    out
}

/// Validates a set of trees, additionally requiring one tree per intent.
pub fn validate_forest<'a>(trees: impl IntoIterator<Item = &'a East>) -> Vec<Violation> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for tree in trees {
        for mut v in validate(tree) {
            v.path = format!("{}:{}", tree.intent, v.path);
            out.push(v);
        }
        if !seen.insert(tree.intent.as_str()) {
            out.push(Violation {
                path: format!("{}:root", tree.intent),
                message: "more than one tree for this intent".into(),
            });
        }
    }
    out
}

fn check_node(node: &EastNode, path: &str, report: &mut impl FnMut(&str, String)) {
    if !(node.weight > 0.0 && node.weight <= 1.0) {
        report(path, format!("weight {} outside (0, 1]", node.weight));
    }
    if let Some(d) = node.dropout {
        if !(0.0..1.0).contains(&d) {
            report(path, format!("dropout {d} outside [0, 1)"));
        }
    }

    match node.kind {
        NodeKind::FixedContent => {
            if !node.children.is_empty() {
                report(path, "fixed content node has children".into());
            }
            if node.dictionary.is_empty() {
                report(path, "fixed content node has an empty dictionary".into());
            }
            for (phrase, &count) in &node.dictionary {
                if count == 0 {
                    report(path, format!("phrase {phrase:?} has count 0"));
                }
                if phrase.is_empty() || phrase.split(' ').any(str::is_empty) || phrase.contains(['\t', '\n', '\r']) {
                    report(path, format!("phrase {phrase:?} is not single-space separated tokens"));
                }
            }
            if node.slot.is_some() {
                report(path, "fixed content node carries a slot".into());
            }
        }
        NodeKind::EntityContent => {
            if !node.children.is_empty() {
                report(path, "entity content node has children".into());
            }
            match &node.slot {
                Some(slot) if !slot.is_empty() && !slot.chars().any(char::is_whitespace) => {}
                Some(slot) => report(path, format!("invalid slot label {slot:?}")),
                None => report(path, "entity content node has no slot".into()),
            }
            if node.dropout.is_some() {
                report(path, "entity content node has a dropout".into());
            }
            if !node.dictionary.is_empty() {
                report(path, "entity content node has a dictionary".into());
            }
        }
        kind => {
            if node.children.is_empty() {
                report(path, format!("{kind} node has no children"));
            }
            if !node.dictionary.is_empty() {
                report(path, format!("{kind} node has a dictionary"));
            }
            if node.slot.is_some() {
                report(path, format!("{kind} node carries a slot"));
            }
            if kind == NodeKind::PickOne && !node.children.is_empty() {
                let sum: f64 = node.children.iter().map(|c| c.weight).sum();
                if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
                    report(path, format!("child weights sum to {sum}, expected 1"));
                }
            }
        }
    }

    for (i, child) in node.children.iter().enumerate() {
        check_node(child, &format!("{path}/{i}"), report);
    }
}
