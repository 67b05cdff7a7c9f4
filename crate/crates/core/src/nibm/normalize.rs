//! Canonical form for process graphs.
//!
//! Two models that differ only in element order and id spelling must
//! serialize to identical bytes after normalization. Node order is fixed
//! by a breadth-first walk from the unique start node; ties between
//! siblings are broken by an iteratively refined structural signature
//! (kind, label and guard data folded over the neighborhood), so the walk
//! does not depend on input order. Nodes left over by the walk
//! (unreachable ones in ill-formed models) are appended in signature
//! order. Ids are then renumbered densely across the whole model: nodes
//! count from 1 in walk order, transitions and performers continue the
//! sequence, so every element id is unique even across namespaces.
//!
//! No element is dropped or rewritten beyond ids and ordering, and the
//! procedure is a pure function of the graph structure, which makes it
//! idempotent.

use super::{NibmProcess, NibmTransition, NodeKind, Performer};
use crate::report::StructuralError;
use std::collections::BTreeMap;

/// Old-to-new id assignments produced by a normalization run, one map per
/// id namespace.
#[derive(Debug, Clone, Default)]
pub struct IdRemap {
    pub nodes: BTreeMap<String, String>,
    pub transitions: BTreeMap<String, String>,
    pub performers: BTreeMap<String, String>,
}

impl IdRemap {
    /// Remap an id that may come from any namespace. Synthesized ids are
    /// unique across namespaces, so first match wins.
    pub fn any(&self, id: &str) -> Option<&String> {
        self.nodes
            .get(id)
            .or_else(|| self.transitions.get(id))
            .or_else(|| self.performers.get(id))
    }
}

pub fn normalize(model: &NibmProcess) -> Result<NibmProcess, StructuralError> {
    normalize_with_map(model).map(|(m, _)| m)
}

pub fn normalize_with_map(model: &NibmProcess) -> Result<(NibmProcess, IdRemap), StructuralError> {
    let idx = model.index()?;
    let n = model.nodes.len();

    // structural signatures: start from (kind, label), fold sorted
    // neighbor data in for as many rounds as the graph is deep
    let mut sig: Vec<u64> = model
        .nodes
        .iter()
        .map(|node| {
            fxhash(&format!(
                "{}|{}|{}",
                node.kind.as_str(),
                node.label.as_deref().unwrap_or(""),
                node.performer
                    .as_deref()
                    .and_then(|p| idx.perf_pos.get(p))
                    .map(|&i| {
                        let r = &model.performers[i].referent;
                        format!("{}:{}", r.kind_str(), r.name())
                    })
                    .unwrap_or_default()
            ))
        })
        .collect();
    for _ in 0..n {
        let mut next = Vec::with_capacity(n);
        for i in 0..n {
            let mut out: Vec<(String, u64)> = idx.outflows[i]
                .iter()
                .map(|&t| {
                    let tr = &model.transitions[t];
                    (
                        format!("{}|{}", tr.kind.as_str(), tr.guard.as_deref().unwrap_or("")),
                        sig[idx.node_pos[&tr.target]],
                    )
                })
                .collect();
            out.sort();
            let mut inc: Vec<(String, u64)> = idx.inflows[i]
                .iter()
                .map(|&t| {
                    let tr = &model.transitions[t];
                    (
                        format!("{}|{}", tr.kind.as_str(), tr.guard.as_deref().unwrap_or("")),
                        sig[idx.node_pos[&tr.source]],
                    )
                })
                .collect();
            inc.sort();
            next.push(fxhash(&format!("{}|{out:?}|{inc:?}", sig[i])));
        }
        if next == sig {
            break;
        }
        sig = next;
    }

    // breadth-first order from the start node
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut starts: Vec<usize> = (0..n)
        .filter(|&i| model.nodes[i].kind == NodeKind::Start)
        .collect();
    starts.sort_by_key(|&i| sig[i]);
    let mut queue: std::collections::VecDeque<usize> = std::collections::VecDeque::new();
    for s in starts {
        if !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(i) = queue.pop_front() {
        order.push(i);
        let mut succs: Vec<(String, u64, usize)> = idx.outflows[i]
            .iter()
            .map(|&t| {
                let tr = &model.transitions[t];
                let j = idx.node_pos[&tr.target];
                (
                    format!(
                        "{}|{}|{}",
                        model.nodes[j].kind.as_str(),
                        model.nodes[j].label.as_deref().unwrap_or(""),
                        tr.guard.as_deref().unwrap_or("")
                    ),
                    sig[j],
                    j,
                )
            })
            .collect();
        succs.sort_by(|a, b| (&a.0, a.1).cmp(&(&b.0, b.1)));
        for (_, _, j) in succs {
            if !seen[j] {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    let mut rest: Vec<usize> = (0..n).filter(|&i| !seen[i]).collect();
    rest.sort_by_key(|&i| {
        (
            model.nodes[i].kind,
            model.nodes[i].label.clone().unwrap_or_default(),
            sig[i],
        )
    });
    order.extend(rest);

    let mut remap = IdRemap::default();
    let mut new_nodes = Vec::with_capacity(n);
    let mut new_pos = vec![0usize; n];
    for (new_i, &old_i) in order.iter().enumerate() {
        new_pos[old_i] = new_i;
        let mut node = model.nodes[old_i].clone();
        remap.nodes.insert(node.id.clone(), (new_i + 1).to_string());
        node.id = (new_i + 1).to_string();
        new_nodes.push(node);
    }

    // transitions continue the numbering: endpoints first, then kind and
    // guard
    let mut next_id = n;
    let mut trans_order: Vec<usize> = (0..model.transitions.len()).collect();
    trans_order.sort_by_key(|&i| {
        let t = &model.transitions[i];
        (
            new_pos[idx.node_pos[&t.source]],
            new_pos[idx.node_pos[&t.target]],
            t.kind,
            t.guard.clone().unwrap_or_default(),
        )
    });
    let mut new_transitions: Vec<NibmTransition> = Vec::with_capacity(trans_order.len());
    for &old_i in &trans_order {
        next_id += 1;
        let mut t = model.transitions[old_i].clone();
        remap.transitions.insert(t.id.clone(), next_id.to_string());
        t.id = next_id.to_string();
        t.source = remap.nodes[&t.source].clone();
        t.target = remap.nodes[&t.target].clone();
        new_transitions.push(t);
    }

    // performers come last: order by referent, then by the positions of
    // referencing nodes
    let mut perf_order: Vec<usize> = (0..model.performers.len()).collect();
    let refs_of = |pid: &str| -> Vec<usize> {
        let mut v: Vec<usize> = model
            .nodes
            .iter()
            .enumerate()
            .filter(|(_, nd)| nd.performer.as_deref() == Some(pid))
            .map(|(i, _)| new_pos[i])
            .collect();
        v.sort();
        v
    };
    perf_order.sort_by_key(|&i| {
        let p = &model.performers[i];
        (p.referent.clone(), refs_of(&p.id))
    });
    let mut new_performers: Vec<Performer> = Vec::with_capacity(perf_order.len());
    for &old_i in &perf_order {
        next_id += 1;
        let mut p = model.performers[old_i].clone();
        remap.performers.insert(p.id.clone(), next_id.to_string());
        p.id = next_id.to_string();
        new_performers.push(p);
    }
    for node in &mut new_nodes {
        if let Some(p) = &node.performer {
            if let Some(np) = remap.performers.get(p) {
                node.performer = Some(np.clone());
            }
        }
    }

    let normalized = NibmProcess {
        id: model.id.clone(),
        name: model.name.clone(),
        nodes: new_nodes,
        transitions: new_transitions,
        performers: new_performers,
        context: model.context.clone(),
    };
    Ok((normalized, remap))
}

/// FNV-1a; stability across runs and platforms is all that matters here.
fn fxhash(s: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}
