//! Native metamodel for the UML-2.0 activity diagram fragment.
//!
//! The mirror image of the GRADE notation: control logic is carried by
//! explicit nodes (DecisionNode, MergeNode, ForkNode, JoinNode), actions
//! are strictly one-in/one-out, and partitions stand in for performers.
//! Object flow, pins, signals and regions are out of this fragment.

mod io;
mod validate;

pub use io::{read_umlad, write_umlad};
pub use validate::{validate_umlad, RULES};

use crate::iso::{self, DiGraph, IsoOutcome};
use crate::report::StructuralError;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum UmlNodeKind {
    Action,
    DecisionNode,
    MergeNode,
    ForkNode,
    JoinNode,
    InitialNode,
    ActivityFinalNode,
}

impl UmlNodeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            UmlNodeKind::Action => "Action",
            UmlNodeKind::DecisionNode => "DecisionNode",
            UmlNodeKind::MergeNode => "MergeNode",
            UmlNodeKind::ForkNode => "ForkNode",
            UmlNodeKind::JoinNode => "JoinNode",
            UmlNodeKind::InitialNode => "InitialNode",
            UmlNodeKind::ActivityFinalNode => "ActivityFinalNode",
        }
    }

    pub fn parse(s: &str) -> Option<UmlNodeKind> {
        Some(match s {
            "Action" => UmlNodeKind::Action,
            "DecisionNode" => UmlNodeKind::DecisionNode,
            "MergeNode" => UmlNodeKind::MergeNode,
            "ForkNode" => UmlNodeKind::ForkNode,
            "JoinNode" => UmlNodeKind::JoinNode,
            "InitialNode" => UmlNodeKind::InitialNode,
            "ActivityFinalNode" => UmlNodeKind::ActivityFinalNode,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UmlNode {
    pub id: String,
    pub kind: UmlNodeKind,
    /// Required non-empty for actions, unused otherwise.
    pub name: Option<String>,
    /// Partition id; carries the performer reference.
    pub partition: Option<String>,
}

impl UmlNode {
    pub fn new(id: impl Into<String>, kind: UmlNodeKind) -> Self {
        UmlNode {
            id: id.into(),
            kind,
            name: None,
            partition: None,
        }
    }

    pub fn action(id: impl Into<String>, name: impl Into<String>) -> Self {
        UmlNode {
            id: id.into(),
            kind: UmlNodeKind::Action,
            name: Some(name.into()),
            partition: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UmlControlFlow {
    pub id: String,
    pub source: String,
    pub target: String,
    /// Only allowed on edges leaving a DecisionNode.
    pub guard: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UmlPartition {
    pub id: String,
    pub name: String,
    /// Resource, OrganizationalUnit, Role or Qualification.
    pub kind: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UmlActivity {
    pub name: String,
    pub nodes: Vec<UmlNode>,
    pub edges: Vec<UmlControlFlow>,
    pub partitions: Vec<UmlPartition>,
}

impl UmlActivity {
    pub fn new(name: impl Into<String>) -> Self {
        UmlActivity {
            name: name.into(),
            nodes: Vec::new(),
            edges: Vec::new(),
            partitions: Vec::new(),
        }
    }

    pub fn element_ids(&self) -> Vec<String> {
        self.nodes
            .iter()
            .map(|n| n.id.clone())
            .chain(self.edges.iter().map(|e| e.id.clone()))
            .chain(self.partitions.iter().map(|p| p.id.clone()))
            .collect()
    }

    pub(crate) fn index(&self) -> Result<UmlIndex, StructuralError> {
        let mut node_pos = BTreeMap::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if node_pos.insert(n.id.clone(), i).is_some() {
                return Err(StructuralError::DuplicateNode(n.id.clone()));
            }
        }
        let mut edge_pos = BTreeMap::new();
        for (i, e) in self.edges.iter().enumerate() {
            if edge_pos.insert(e.id.clone(), i).is_some() {
                return Err(StructuralError::DuplicateTransition(e.id.clone()));
            }
        }
        let mut part_pos = BTreeMap::new();
        for (i, p) in self.partitions.iter().enumerate() {
            if part_pos.insert(p.id.clone(), i).is_some() {
                return Err(StructuralError::DuplicatePerformer(p.id.clone()));
            }
        }
        let mut in_edges = vec![Vec::new(); self.nodes.len()];
        let mut out_edges = vec![Vec::new(); self.nodes.len()];
        for (i, e) in self.edges.iter().enumerate() {
            let s = *node_pos
                .get(&e.source)
                .ok_or_else(|| StructuralError::UnresolvedSource {
                    transition: e.id.clone(),
                    node: e.source.clone(),
                })?;
            let t = *node_pos
                .get(&e.target)
                .ok_or_else(|| StructuralError::UnresolvedTarget {
                    transition: e.id.clone(),
                    node: e.target.clone(),
                })?;
            out_edges[s].push(i);
            in_edges[t].push(i);
        }
        Ok(UmlIndex {
            node_pos,
            part_pos,
            in_edges,
            out_edges,
        })
    }

    pub(crate) fn to_digraph(&self) -> Result<DiGraph, StructuralError> {
        let idx = self.index()?;
        let labels = self
            .nodes
            .iter()
            .map(|n| {
                let partition = n
                    .partition
                    .as_deref()
                    .and_then(|p| idx.part_pos.get(p))
                    .map(|&i| format!("{}:{}", self.partitions[i].kind, self.partitions[i].name))
                    .unwrap_or_default();
                format!(
                    "{}|{}|{}",
                    n.kind.as_str(),
                    n.name.as_deref().unwrap_or(""),
                    partition
                )
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|e| {
                (
                    idx.node_pos[&e.source],
                    idx.node_pos[&e.target],
                    e.guard.clone().unwrap_or_default(),
                )
            })
            .collect();
        Ok(DiGraph {
            ids: self.nodes.iter().map(|n| n.id.clone()).collect(),
            labels,
            edges,
        })
    }
}

/// Structure-level isomorphism between two activities.
pub fn isomorphic_umlad(a: &UmlActivity, b: &UmlActivity) -> Result<IsoOutcome, StructuralError> {
    Ok(iso::isomorphic(&a.to_digraph()?, &b.to_digraph()?))
}

pub(crate) struct UmlIndex {
    pub node_pos: BTreeMap<String, usize>,
    pub part_pos: BTreeMap<String, usize>,
    pub in_edges: Vec<Vec<usize>>,
    pub out_edges: Vec<Vec<usize>>,
}


#[cfg(test)]
mod tests {
    use super::testutil::*;
    use super::*;

    #[test]
    fn index_builds_for_full_vocabulary() {
        let m = full_vocabulary();
        let idx = m.index().unwrap();
        let j = idx.node_pos["j"];
        assert_eq!(idx.in_edges[j].len(), 2);
        assert_eq!(idx.out_edges[j].len(), 1);
    }

    #[test]
    fn isomorphism_is_order_insensitive() {
        let a = full_vocabulary();
        let mut b = full_vocabulary();
        b.nodes.reverse();
        b.edges.reverse();
        assert!(isomorphic_umlad(&a, &b).unwrap().is_isomorphic());
    }

    #[test]
    fn guard_text_is_compared() {
        let a = full_vocabulary();
        let mut b = full_vocabulary();
        b.edges[1].guard = Some("slow".into());
        assert!(!isomorphic_umlad(&a, &b).unwrap().is_isomorphic());
    }
}
