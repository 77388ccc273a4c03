//! Growth state for one intent's tree.
//!
//! Templates are routed to branches by the sequence of main-entity
//! placeholders they contain (the branch key). The branch holding the most
//! sentences defines the spine. Literal runs between key entities accumulate
//! as content regions, and adjacent key entities that appear in both orders
//! across the corpus are normalized to one order and later emitted as an
//! exchangeable pair.

use std::collections::{BTreeMap, BTreeSet};

use crate::dataset::{Segment, SentenceTemplate};
use crate::east::{East, EastNode};

/// Builder state between [`skeleton`] and [`TreeDraft::finalize`].
#[derive(Debug, Clone)]
pub struct TreeDraft {
    intent: String,
    main: BTreeSet<String>,
    // canonical orientation of each exchangeable label pair
    swap_pairs: BTreeSet<(String, String)>,
    branches: Vec<BranchDraft>,
    primary: Option<usize>,
    seen: usize,
}

#[derive(Debug, Clone)]
struct BranchDraft {
    key: Vec<String>,
    // positions i whose entities i and i+1 form an exchangeable pair
    exchangeable: BTreeSet<usize>,
    normalized: bool,
    first_seen: usize,
    count: u64,
    regions: Vec<Region>,
}

#[derive(Debug, Clone, Default)]
struct Region {
    // distinct non-empty runs in first-seen order
    runs: Vec<(Vec<Segment>, u64)>,
}

impl Region {
    fn add(&mut self, run: &[Segment], count: u64) {
        if run.is_empty() {
            return;
        }
        match self.runs.iter_mut().find(|(r, _)| r.as_slice() == run) {
            Some((_, c)) => *c += count,
            None => self.runs.push((run.to_vec(), count)),
        }
    }
}

/// Where a template's main-entity placeholders sit.
struct Placement {
    // segment index of each main placeholder, in reading order
    at: Vec<usize>,
    raw_key: Vec<String>,
    key: Vec<String>,
    swapped: Vec<usize>,
}

impl Placement {
    fn adjacent(&self, i: usize) -> bool {
        i + 1 < self.at.len() && self.at[i + 1] == self.at[i] + 1
    }
}

/// Sets up growth for one intent: records the main labels, finds label pairs
/// realized in both orders, and lays out one branch per normalized key. The
/// most frequent key (earliest on ties) is the spine.
pub fn skeleton(intent: &str, main: &[String], templates: &[SentenceTemplate]) -> TreeDraft {
    let main: BTreeSet<String> = main.iter().cloned().collect();

    let mut observed: Vec<(String, String)> = Vec::new();
    for template in templates {
        let at = main_positions(&main, template);
        for w in at.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if b.0 == a.0 + 1 && a.1 != b.1 {
                let pair = (a.1.to_string(), b.1.to_string());
                if !observed.contains(&pair) {
                    observed.push(pair);
                }
            }
        }
    }
    let mut swap_pairs = BTreeSet::new();
    for (a, b) in &observed {
        let reverse = (b.clone(), a.clone());
        if observed.contains(&reverse) && !swap_pairs.contains(&reverse) {
            swap_pairs.insert((a.clone(), b.clone()));
        }
    }

    let mut draft = TreeDraft {
        intent: intent.to_string(),
        main,
        swap_pairs,
        branches: Vec::new(),
        primary: None,
        seen: 0,
    };

    let mut groups: Vec<(Vec<String>, usize, u64, Vec<Placement>)> = Vec::new();
    for (i, template) in templates.iter().enumerate() {
        let placement = draft.place(template);
        match groups.iter_mut().find(|g| g.0 == placement.key) {
            Some(group) => {
                group.2 += template.source_count;
                group.3.push(placement);
            }
            None => groups.push((placement.key.clone(), i, template.source_count, vec![placement])),
        }
    }

    let mut best: Option<(u64, usize)> = None;
    for (key, first_seen, count, members) in groups {
        let mut exchangeable = BTreeSet::new();
        let mut i = 0;
        while i + 1 < key.len() {
            let pair = (key[i].clone(), key[i + 1].clone());
            if draft.swap_pairs.contains(&pair) && members.iter().all(|p| p.adjacent(i)) {
                exchangeable.insert(i);
                i += 2;
            } else {
                i += 1;
            }
        }
        if best.is_none_or(|(c, _)| count > c) {
            best = Some((count, draft.branches.len()));
        }
        draft
            .branches
            .push(BranchDraft::new(key, exchangeable, true, first_seen));
    }
    draft.primary = best.map(|(_, i)| i);
    draft
}

fn main_positions<'a>(main: &BTreeSet<String>, template: &'a SentenceTemplate) -> Vec<(usize, &'a str)> {
    template
        .segments
        .iter()
        .enumerate()
        .filter_map(|(i, s)| s.placeholder_label().filter(|l| main.contains(*l)).map(|l| (i, l)))
        .collect()
}

impl BranchDraft {
    fn new(key: Vec<String>, exchangeable: BTreeSet<usize>, normalized: bool, first_seen: usize) -> Self {
        let regions = vec![Region::default(); key.len() + 1];
        BranchDraft {
            key,
            exchangeable,
            normalized,
            first_seen,
            count: 0,
            regions,
        }
    }

    fn accepts(&self, placement: &Placement) -> bool {
        self.normalized
            && self.key == placement.key
            && placement.swapped.iter().all(|i| self.exchangeable.contains(i))
            && self.exchangeable.iter().all(|&i| placement.adjacent(i))
    }

    fn add(&mut self, template: &SentenceTemplate, at: &[usize]) {
        self.count += template.source_count;
        let segments = &template.segments;
        let mut start = 0;
        for (k, &pos) in at.iter().enumerate() {
            self.regions[k].add(&segments[start..pos], template.source_count);
            start = pos + 1;
        }
        self.regions[at.len()].add(&segments[start..], template.source_count);
    }
}

impl TreeDraft {
    pub fn intent(&self) -> &str {
        &self.intent
    }

    /// Main-entity labels of the spine, in order.
    pub fn spine(&self) -> &[String] {
        self.primary.map(|i| self.branches[i].key.as_slice()).unwrap_or(&[])
    }

    /// Spine positions `i` where entities `i` and `i + 1` are exchangeable.
    pub fn spine_exchangeable(&self) -> Vec<usize> {
        self.primary
            .map(|i| self.branches[i].exchangeable.iter().copied().collect())
            .unwrap_or_default()
    }

    /// The bare spine as a tree: an order node over its entity leaves.
    pub fn spine_tree(&self) -> East {
        East::new(
            self.intent.clone(),
            EastNode::order(self.spine().iter().map(EastNode::entity).collect()),
        )
    }

    /// Number of branches that have received at least one template.
    pub fn branch_count(&self) -> usize {
        self.branches.iter().filter(|b| b.count > 0).count()
    }

    /// Total sentences grown so far.
    pub fn sentence_count(&self) -> u64 {
        self.branches.iter().map(|b| b.count).sum()
    }

    fn place(&self, template: &SentenceTemplate) -> Placement {
        let positions = main_positions(&self.main, template);
        let at: Vec<usize> = positions.iter().map(|p| p.0).collect();
        let raw_key: Vec<String> = positions.iter().map(|p| p.1.to_string()).collect();
        let mut key = raw_key.clone();
        let mut swapped = Vec::new();
        let mut j = 0;
        while j + 1 < key.len() {
            let adjacent = at[j + 1] == at[j] + 1;
            let forward = (key[j].clone(), key[j + 1].clone());
            let backward = (key[j + 1].clone(), key[j].clone());
            if adjacent && self.swap_pairs.contains(&backward) {
                key.swap(j, j + 1);
                swapped.push(j);
                j += 2;
            } else if adjacent && self.swap_pairs.contains(&forward) {
                j += 2;
            } else {
                j += 1;
            }
        }
        Placement {
            at,
            raw_key,
            key,
            swapped,
        }
    }

    /// Merges one template into the branch its main entities match, or into a
    /// separate branch keyed by its unnormalized entity sequence.
    pub fn grow(&mut self, template: &SentenceTemplate) {
        let index = self.seen;
        self.seen += 1;
        let placement = self.place(template);
        if let Some(branch) = self.branches.iter_mut().find(|b| b.accepts(&placement)) {
            branch.add(template, &placement.at);
            return;
        }
        let branch = match self
            .branches
            .iter()
            .position(|b| !b.normalized && b.key == placement.raw_key)
        {
            Some(i) => &mut self.branches[i],
            None => {
                self.branches.push(BranchDraft::new(
                    placement.raw_key.clone(),
                    BTreeSet::new(),
                    false,
                    index,
                ));
                self.branches.last_mut().unwrap()
            }
        };
        branch.add(template, &placement.at);
    }

    /// Emits the tree. Weights are occurrence counts over the sentences of the
    /// enclosing scope, renormalized across pick-one siblings. A region missing
    /// from some sentences gets dropout = missing / scope.
    pub fn finalize(&self) -> East {
        let mut live: Vec<&BranchDraft> = self.branches.iter().filter(|b| b.count > 0).collect();
        live.sort_by_key(|b| b.first_seen);
        let total: u64 = live.iter().map(|b| b.count).sum();

        let mut orders: Vec<EastNode> = live
            .iter()
            .map(|b| branch_node(b).with_weight(b.count as f64 / total as f64))
            .collect();
        let root = if orders.len() == 1 {
            orders.pop().unwrap().with_weight(1.0)
        } else {
            EastNode::pick_one(orders)
        };
        East::new(self.intent.clone(), root)
    }
}

fn branch_node(branch: &BranchDraft) -> EastNode {
    let mut children = Vec::new();
    let mut k = 0;
    while k <= branch.key.len() {
        if let Some(region) = region_node(&branch.regions[k].runs, branch.count) {
            children.push(region);
        }
        if k == branch.key.len() {
            break;
        }
        if branch.exchangeable.contains(&k) {
            children.push(EastNode::exchangeable(vec![
                EastNode::entity(&branch.key[k]),
                EastNode::entity(&branch.key[k + 1]),
            ]));
            // the region between an exchangeable pair is always empty
            k += 1;
        } else {
            children.push(EastNode::entity(&branch.key[k]));
        }
        k += 1;
    }
    EastNode::order(children)
}

fn region_node(runs: &[(Vec<Segment>, u64)], scope: u64) -> Option<EastNode> {
    let present: u64 = runs.iter().map(|r| r.1).sum();
    if present == 0 {
        return None;
    }

    let mut shapes: Vec<(Vec<&str>, Vec<(&[Segment], u64)>, u64)> = Vec::new();
    for (run, count) in runs {
        let shape: Vec<&str> = run.iter().filter_map(Segment::placeholder_label).collect();
        match shapes.iter_mut().find(|s| s.0 == shape) {
            Some(s) => {
                s.1.push((run, *count));
                s.2 += count;
            }
            None => shapes.push((shape, vec![(run, *count)], *count)),
        }
    }

    let mut nodes: Vec<EastNode> = shapes
        .iter()
        .map(|(shape, runs, count)| {
            let node = if shape.is_empty() {
                EastNode::fixed(runs.iter().map(|(run, c)| (literal_phrase(run), *c)))
            } else {
                shape_node(shape, runs, *count)
            };
            node.with_weight(*count as f64 / present as f64)
        })
        .collect();

    let mut node = if nodes.len() == 1 {
        nodes.pop().unwrap()
    } else {
        EastNode::pick_one(nodes)
    };
    node.weight = present as f64 / scope as f64;
    if present < scope {
        node.dropout = Some((scope - present) as f64 / scope as f64);
    }
    Some(node)
}

/// Order node for runs that share a non-main placeholder sequence.
fn shape_node(shape: &[&str], runs: &[(&[Segment], u64)], scope: u64) -> EastNode {
    let mut pieces: Vec<BTreeMap<Vec<Segment>, u64>> = vec![BTreeMap::new(); shape.len() + 1];
    for (run, count) in runs {
        let mut k = 0;
        let mut start = 0;
        for (i, segment) in run.iter().enumerate() {
            if segment.placeholder_label().is_some() {
                *pieces[k].entry(run[start..i].to_vec()).or_default() += count;
                k += 1;
                start = i + 1;
            }
        }
        *pieces[k].entry(run[start..].to_vec()).or_default() += count;
    }

    let mut children = Vec::new();
    for (k, piece) in pieces.iter().enumerate() {
        let runs: Vec<(Vec<Segment>, u64)> = piece
            .iter()
            .filter(|(p, _)| !p.is_empty())
            .map(|(p, c)| (p.clone(), *c))
            .collect();
        if let Some(node) = region_node(&runs, scope) {
            children.push(node);
        }
        if k < shape.len() {
            children.push(EastNode::entity(shape[k]));
        }
    }
    EastNode::order(children)
}

fn literal_phrase(run: &[Segment]) -> String {
    run.iter()
        .map(|s| match s {
            Segment::Literal(t) => t.as_str(),
            Segment::Placeholder(_) => unreachable!("literal-only run"),
        })
        .collect::<Vec<_>>()
        .join(" ")
}
