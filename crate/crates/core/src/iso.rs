//! Small labeled-digraph isomorphism checker.
//!
//! All three metamodels reduce their instances to a [`DiGraph`] of string
//! node labels and string edge labels; two instances are isomorphic when a
//! label- and adjacency-preserving bijection exists between their node
//! sets. The search is plain backtracking with candidate pruning on
//! (label, in-degree, out-degree); the models this crate handles are desk
//! sized, so no VF2-style machinery is warranted.

use std::collections::BTreeMap;

/// Flattened view of a model: nodes carry a canonical label string, edges
/// carry a label and endpoint indices. `ids` keeps the original element
/// ids for witness reporting.
#[derive(Debug, Clone)]
pub struct DiGraph {
    pub ids: Vec<String>,
    pub labels: Vec<String>,
    pub edges: Vec<(usize, usize, String)>,
}

/// Outcome of an isomorphism check: either a witness node correspondence
/// (original ids, left to right) or a description of the first mismatch
/// found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsoOutcome {
    Isomorphic { witness: Vec<(String, String)> },
    Mismatch { reason: String },
}

impl IsoOutcome {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self, IsoOutcome::Isomorphic { .. })
    }
}

struct Search {
    // adjacency as (neighbor, sorted edge labels between the pair)
    a_adj: Vec<BTreeMap<usize, Vec<String>>>,
    b_adj: Vec<BTreeMap<usize, Vec<String>>>,
    mapping: Vec<Option<usize>>,
    used: Vec<bool>,
}

fn adjacency(g: &DiGraph) -> Vec<BTreeMap<usize, Vec<String>>> {
    let mut adj: Vec<BTreeMap<usize, Vec<String>>> = vec![BTreeMap::new(); g.labels.len()];
    for (s, t, l) in &g.edges {
        adj[*s].entry(*t).or_default().push(l.clone());
    }
    for m in &mut adj {
        for labels in m.values_mut() {
            labels.sort();
        }
    }
    adj
}

fn degrees(g: &DiGraph) -> Vec<(usize, usize)> {
    let mut deg = vec![(0usize, 0usize); g.labels.len()];
    for (s, t, _) in &g.edges {
        deg[*s].1 += 1;
        deg[*t].0 += 1;
    }
    deg
}

impl Search {
    fn consistent(&self, na: usize, nb: usize) -> bool {
        // every already-mapped neighbor relation of na must hold for nb
        for (ta, labels) in &self.a_adj[na] {
            if let Some(tb) = self.mapping[*ta] {
                match self.b_adj[nb].get(&tb) {
                    Some(bl) if bl == labels => {}
                    _ => return false,
                }
            }
        }
        // and the reverse direction: edges into na from mapped nodes
        for (sa, m) in self.a_adj.iter().enumerate() {
            if let Some(labels) = m.get(&na) {
                if let Some(sb) = self.mapping[sa] {
                    match self.b_adj[sb].get(&nb) {
                        Some(bl) if bl == labels => {}
                        _ => return false,
                    }
                }
            }
        }
        true
    }

    fn solve(&mut self, order: &[usize], candidates: &[Vec<usize>], depth: usize) -> bool {
        if depth == order.len() {
            return true;
        }
        let na = order[depth];
        for &nb in &candidates[depth] {
            if self.used[nb] || !self.consistent(na, nb) {
                continue;
            }
            self.mapping[na] = Some(nb);
            self.used[nb] = true;
            if self.solve(order, candidates, depth + 1) {
                return true;
            }
            self.mapping[na] = None;
            self.used[nb] = false;
        }
        false
    }
}

pub fn isomorphic(a: &DiGraph, b: &DiGraph) -> IsoOutcome {
    if a.labels.len() != b.labels.len() {
        return IsoOutcome::Mismatch {
            reason: format!(
                "node counts differ: {} vs {}",
                a.labels.len(),
                b.labels.len()
            ),
        };
    }
    if a.edges.len() != b.edges.len() {
        return IsoOutcome::Mismatch {
            reason: format!("edge counts differ: {} vs {}", a.edges.len(), b.edges.len()),
        };
    }
    let mut count_a: BTreeMap<&str, usize> = BTreeMap::new();
    let mut count_b: BTreeMap<&str, usize> = BTreeMap::new();
    for l in &a.labels {
        *count_a.entry(l).or_default() += 1;
    }
    for l in &b.labels {
        *count_b.entry(l).or_default() += 1;
    }
    if count_a != count_b {
        for (l, n) in &count_a {
            if count_b.get(l) != Some(n) {
                return IsoOutcome::Mismatch {
                    reason: format!(
                        "label multiset differs at {l:?}: {} vs {}",
                        n,
                        count_b.get(l).unwrap_or(&0)
                    ),
                };
            }
        }
    }
    let mut edge_labels_a: Vec<&str> = a.edges.iter().map(|(_, _, l)| l.as_str()).collect();
    let mut edge_labels_b: Vec<&str> = b.edges.iter().map(|(_, _, l)| l.as_str()).collect();
    edge_labels_a.sort_unstable();
    edge_labels_b.sort_unstable();
    if edge_labels_a != edge_labels_b {
        return IsoOutcome::Mismatch {
            reason: "edge label multisets differ".into(),
        };
    }

    let deg_a = degrees(a);
    let deg_b = degrees(b);
    let n = a.labels.len();

    // candidate sets per left node, most constrained first
    let mut order: Vec<usize> = (0..n).collect();
    let cand_for = |na: usize| -> Vec<usize> {
        (0..n)
            .filter(|&nb| a.labels[na] == b.labels[nb] && deg_a[na] == deg_b[nb])
            .collect()
    };
    let all_cands: Vec<Vec<usize>> = (0..n).map(cand_for).collect();
    if let Some(na) = (0..n).find(|&i| all_cands[i].is_empty()) {
        return IsoOutcome::Mismatch {
            reason: format!("no counterpart for node {} ({})", a.ids[na], a.labels[na]),
        };
    }
    order.sort_by_key(|&i| all_cands[i].len());
    let candidates: Vec<Vec<usize>> = order.iter().map(|&i| all_cands[i].clone()).collect();

    let mut search = Search {
        a_adj: adjacency(a),
        b_adj: adjacency(b),
        mapping: vec![None; n],
        used: vec![false; n],
    };
    if search.solve(&order, &candidates, 0) {
        let witness = (0..n)
            .map(|i| (a.ids[i].clone(), b.ids[search.mapping[i].unwrap()].clone()))
            .collect();
        IsoOutcome::Isomorphic { witness }
    } else {
        IsoOutcome::Mismatch {
            reason: "no structure-preserving bijection exists".into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(labels: &[&str], edges: &[(usize, usize, &str)]) -> DiGraph {
        DiGraph {
            ids: (0..labels.len()).map(|i| format!("n{i}")).collect(),
            labels: labels.iter().map(|s| s.to_string()).collect(),
            edges: edges
                .iter()
                .map(|(s, t, l)| (*s, *t, l.to_string()))
                .collect(),
        }
    }

    #[test]
    fn identical_graphs_are_isomorphic() {
        let a = g(&["x", "y"], &[(0, 1, "e")]);
        assert!(isomorphic(&a, &a.clone()).is_isomorphic());
    }

    #[test]
    fn branch_order_is_not_identity() {
        let a = g(
            &["f", "A", "B", "j"],
            &[(0, 1, ""), (0, 2, ""), (1, 3, ""), (2, 3, "")],
        );
        let b = g(
            &["f", "B", "A", "j"],
            &[(0, 1, ""), (0, 2, ""), (1, 3, ""), (2, 3, "")],
        );
        assert!(isomorphic(&a, &b).is_isomorphic());
    }

    #[test]
    fn direction_matters() {
        let a = g(&["A", "B"], &[(0, 1, "")]);
        let b = g(&["A", "B"], &[(1, 0, "")]);
        let out = isomorphic(&a, &b);
        assert!(!out.is_isomorphic());
    }

    #[test]
    fn label_mismatch_reports_reason() {
        let a = g(&["A"], &[]);
        let b = g(&["B"], &[]);
        match isomorphic(&a, &b) {
            IsoOutcome::Mismatch { reason } => assert!(reason.contains("label")),
            _ => panic!("expected mismatch"),
        }
    }

    #[test]
    fn parallel_edges_with_labels() {
        let a = g(&["d", "m"], &[(0, 1, "yes"), (0, 1, "else")]);
        let b = g(&["d", "m"], &[(0, 1, "else"), (0, 1, "yes")]);
        assert!(isomorphic(&a, &b).is_isomorphic());
        let c = g(&["d", "m"], &[(0, 1, "yes"), (0, 1, "yes")]);
        assert!(!isomorphic(&a, &c).is_isomorphic());
    }
}
