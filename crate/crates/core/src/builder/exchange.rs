use std::collections::BTreeSet;

use crate::dataset::SentenceTemplate;
use crate::east::{East, EastNode, NodeKind};

/// Label pairs that some template realizes as `<a> <b>` and another as
/// `<b> <a>`, both directly adjacent.
pub fn exchangeable_pairs(templates: &[SentenceTemplate]) -> BTreeSet<(String, String)> {
    let mut seen = BTreeSet::new();
    for template in templates {
        for w in template.segments.windows(2) {
            if let (Some(a), Some(b)) = (w[0].placeholder_label(), w[1].placeholder_label()) {
                if a != b {
                    seen.insert((a.to_string(), b.to_string()));
                }
            }
        }
    }
    seen.iter()
        .filter(|(a, b)| seen.contains(&(b.clone(), a.clone())))
        .cloned()
        .collect()
}

/// Wraps every adjacent pair of entity leaves under an order node in an
/// exchangeable node when the corpus shows them in both orders. Pairs are
/// taken left to right without overlap.
pub fn detect_exchangeable(mut tree: East, templates: &[SentenceTemplate]) -> East {
    let pairs = exchangeable_pairs(templates);
    if !pairs.is_empty() {
        wrap(&mut tree.root, &pairs);
    }
    tree
}

fn wrap(node: &mut EastNode, pairs: &BTreeSet<(String, String)>) {
    for child in &mut node.children {
        wrap(child, pairs);
    }
    if node.kind != NodeKind::Order {
        return;
    }
    let children = std::mem::take(&mut node.children);
    let mut out = Vec::with_capacity(children.len());
    let mut iter = children.into_iter().peekable();
    while let Some(child) = iter.next() {
        let swap = match (&child.slot, iter.peek().and_then(|n| n.slot.as_ref())) {
            (Some(a), Some(b)) if child.kind == NodeKind::EntityContent => pairs.contains(&(a.clone(), b.clone())),
            _ => false,
        };
        if swap {
            let next = iter.next().unwrap();
            let weight = child.weight;
            out.push(EastNode::exchangeable(vec![child.with_weight(1.0), next.with_weight(1.0)]).with_weight(weight));
        } else {
            out.push(child);
        }
    }
    node.children = out;
}
