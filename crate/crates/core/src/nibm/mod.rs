//! The notation-independent business process metamodel.
//!
//! Every concrete notation is projected onto this graph of nodes and
//! transitions; conversions between notations always pass through it. The
//! model is deliberately explicit: task fan-in and fan-out are never
//! attributes, they are reified as dedicated control nodes, which is what
//! lets attribute-based notations and control-node notations meet in one
//! place.

mod io;
mod iso;
mod normalize;
mod validate;

pub use io::{read_nibm, write_nibm};
pub use iso::isomorphic;
pub use normalize::{normalize, normalize_with_map, IdRemap};
pub use validate::{validate_nibm, RULES};

use crate::iso::DiGraph;
use crate::report::StructuralError;
use std::collections::BTreeMap;

/// Node vocabulary. `Task` is the only labeled, performer-carrying kind;
/// the rest are pure control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKind {
    Task,
    Decision,
    Fork,
    Merge,
    Join,
    Start,
    Stop,
}

impl NodeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            NodeKind::Task => "Task",
            NodeKind::Decision => "Decision",
            NodeKind::Fork => "Fork",
            NodeKind::Merge => "Merge",
            NodeKind::Join => "Join",
            NodeKind::Start => "Start",
            NodeKind::Stop => "Stop",
        }
    }

    pub fn parse(s: &str) -> Option<NodeKind> {
        Some(match s {
            "Task" => NodeKind::Task,
            "Decision" => NodeKind::Decision,
            "Fork" => NodeKind::Fork,
            "Merge" => NodeKind::Merge,
            "Join" => NodeKind::Join,
            "Start" => NodeKind::Start,
            "Stop" => NodeKind::Stop,
            _ => return None,
        })
    }
}

/// Transition vocabulary. `Pass` carries every flow that is not a
/// synthesized trigger attachment (`Incoming`, control into a task) or
/// branch attachment (`Outgoing`, task into control).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TransitionKind {
    Pass,
    Incoming,
    Outgoing,
}

impl TransitionKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TransitionKind::Pass => "Pass",
            TransitionKind::Incoming => "Incoming",
            TransitionKind::Outgoing => "Outgoing",
        }
    }

    pub fn parse(s: &str) -> Option<TransitionKind> {
        Some(match s {
            "Pass" => TransitionKind::Pass,
            "Incoming" => TransitionKind::Incoming,
            "Outgoing" => TransitionKind::Outgoing,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NibmNode {
    pub id: String,
    pub kind: NodeKind,
    /// Required non-empty for tasks, optional elsewhere.
    pub label: Option<String>,
    /// Performer id; tasks only.
    pub performer: Option<String>,
}

impl NibmNode {
    pub fn new(id: impl Into<String>, kind: NodeKind) -> Self {
        NibmNode {
            id: id.into(),
            kind,
            label: None,
            performer: None,
        }
    }

    pub fn task(id: impl Into<String>, label: impl Into<String>) -> Self {
        NibmNode {
            id: id.into(),
            kind: NodeKind::Task,
            label: Some(label.into()),
            performer: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NibmTransition {
    pub id: String,
    pub kind: TransitionKind,
    pub source: String,
    pub target: String,
    /// Only meaningful on transitions leaving a decision. The literal
    /// text `else` marks the default branch.
    pub guard: Option<String>,
}

impl NibmTransition {
    pub fn new(
        id: impl Into<String>,
        kind: TransitionKind,
        source: impl Into<String>,
        target: impl Into<String>,
    ) -> Self {
        NibmTransition {
            id: id.into(),
            kind,
            source: source.into(),
            target: target.into(),
            guard: None,
        }
    }
}

/// What a performer reference actually points at.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum PerformerReferent {
    Resource(String),
    OrganizationalUnit(String),
    Role(String),
    Qualification(String),
}

impl PerformerReferent {
    pub fn kind_str(&self) -> &'static str {
        match self {
            PerformerReferent::Resource(_) => "Resource",
            PerformerReferent::OrganizationalUnit(_) => "OrganizationalUnit",
            PerformerReferent::Role(_) => "Role",
            PerformerReferent::Qualification(_) => "Qualification",
        }
    }

    pub fn name(&self) -> &str {
        match self {
            PerformerReferent::Resource(n)
            | PerformerReferent::OrganizationalUnit(n)
            | PerformerReferent::Role(n)
            | PerformerReferent::Qualification(n) => n,
        }
    }

    pub fn from_parts(kind: &str, name: String) -> Option<Self> {
        Some(match kind {
            "Resource" => PerformerReferent::Resource(name),
            "OrganizationalUnit" => PerformerReferent::OrganizationalUnit(name),
            "Role" => PerformerReferent::Role(name),
            "Qualification" => PerformerReferent::Qualification(name),
            _ => return None,
        })
    }
}

/// Abstract "who does it" reference; it only points, it owns nothing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Performer {
    pub id: String,
    pub referent: PerformerReferent,
}

/// Process surroundings kept at reduced fidelity: the owning enterprise
/// and named input/output artifacts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EnterpriseContext {
    pub enterprise: Option<String>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NibmProcess {
    pub id: String,
    pub name: String,
    pub nodes: Vec<NibmNode>,
    pub transitions: Vec<NibmTransition>,
    pub performers: Vec<Performer>,
    pub context: Option<EnterpriseContext>,
}

impl NibmProcess {
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        NibmProcess {
            id: name.clone(),
            name,
            nodes: Vec::new(),
            transitions: Vec::new(),
            performers: Vec::new(),
            context: None,
        }
    }

    pub fn node(&self, id: &str) -> Option<&NibmNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    /// All element ids a mapping trace must account for.
    pub fn element_ids(&self) -> Vec<String> {
        self.nodes
            .iter()
            .map(|n| n.id.clone())
            .chain(self.transitions.iter().map(|t| t.id.clone()))
            .chain(self.performers.iter().map(|p| p.id.clone()))
            .collect()
    }

    /// Id-to-position maps plus per-node edge lists. Fails on duplicate
    /// ids or unresolved endpoints; everything else is the validator's
    /// business.
    pub(crate) fn index(&self) -> Result<Index, StructuralError> {
        let mut node_pos = BTreeMap::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if node_pos.insert(n.id.clone(), i).is_some() {
                return Err(StructuralError::DuplicateNode(n.id.clone()));
            }
        }
        let mut trans_pos = BTreeMap::new();
        for (i, t) in self.transitions.iter().enumerate() {
            if trans_pos.insert(t.id.clone(), i).is_some() {
                return Err(StructuralError::DuplicateTransition(t.id.clone()));
            }
        }
        let mut perf_pos = BTreeMap::new();
        for (i, p) in self.performers.iter().enumerate() {
            if perf_pos.insert(p.id.clone(), i).is_some() {
                return Err(StructuralError::DuplicatePerformer(p.id.clone()));
            }
        }
        let mut inflows = vec![Vec::new(); self.nodes.len()];
        let mut outflows = vec![Vec::new(); self.nodes.len()];
        for (i, t) in self.transitions.iter().enumerate() {
            let s = *node_pos
                .get(&t.source)
                .ok_or_else(|| StructuralError::UnresolvedSource {
                    transition: t.id.clone(),
                    node: t.source.clone(),
                })?;
            let g = *node_pos
                .get(&t.target)
                .ok_or_else(|| StructuralError::UnresolvedTarget {
                    transition: t.id.clone(),
                    node: t.target.clone(),
                })?;
            outflows[s].push(i);
            inflows[g].push(i);
        }
        Ok(Index {
            node_pos,
            perf_pos,
            inflows,
            outflows,
        })
    }

    /// Reduce to the generic labeled digraph used for isomorphism checks.
    /// Performer ids are erased; only the referent identity matters.
    pub(crate) fn to_digraph(&self) -> Result<DiGraph, StructuralError> {
        let idx = self.index()?;
        let labels = self
            .nodes
            .iter()
            .map(|n| {
                let performer = n
                    .performer
                    .as_deref()
                    .and_then(|p| idx.perf_pos.get(p))
                    .map(|&i| {
                        let r = &self.performers[i].referent;
                        format!("{}:{}", r.kind_str(), r.name())
                    })
                    .unwrap_or_default();
                format!(
                    "{}|{}|{}",
                    n.kind.as_str(),
                    n.label.as_deref().unwrap_or(""),
                    performer
                )
            })
            .collect();
        let edges = self
            .transitions
            .iter()
            .map(|t| {
                (
                    idx.node_pos[&t.source],
                    idx.node_pos[&t.target],
                    format!("{}|{}", t.kind.as_str(), t.guard.as_deref().unwrap_or("")),
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

#[derive(Debug)]
pub(crate) struct Index {
    pub node_pos: BTreeMap<String, usize>,
    pub perf_pos: BTreeMap<String, usize>,
    /// Transition positions entering each node, in model order.
    pub inflows: Vec<Vec<usize>>,
    /// Transition positions leaving each node, in model order.
    pub outflows: Vec<Vec<usize>>,
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;

    /// Start -> Task A -> Stop, arbitrary ids.
    pub fn minimal_chain() -> NibmProcess {
        chain_with_ids("9", "4", "7")
    }

    pub fn chain_with_ids(start: &str, task: &str, stop: &str) -> NibmProcess {
        let mut p = NibmProcess::new("minimal");
        p.nodes.push(NibmNode::new(start, NodeKind::Start));
        p.nodes.push(NibmNode::task(task, "A"));
        p.nodes.push(NibmNode::new(stop, NodeKind::Stop));
        p.transitions
            .push(NibmTransition::new("e1", TransitionKind::Pass, start, task));
        p.transitions
            .push(NibmTransition::new("e2", TransitionKind::Pass, task, stop));
        p
    }

    /// Start -> Fork -> {A, B} -> Join -> C -> Stop.
    pub fn fork_join(first: &str, second: &str) -> NibmProcess {
        let mut p = NibmProcess::new("forkjoin");
        p.nodes.push(NibmNode::new("s", NodeKind::Start));
        p.nodes.push(NibmNode::new("f", NodeKind::Fork));
        p.nodes.push(NibmNode::task("a", first));
        p.nodes.push(NibmNode::task("b", second));
        p.nodes.push(NibmNode::new("j", NodeKind::Join));
        p.nodes.push(NibmNode::task("c", "C"));
        p.nodes.push(NibmNode::new("z", NodeKind::Stop));
        for (id, k, s, t) in [
            ("t1", TransitionKind::Pass, "s", "f"),
            ("t2", TransitionKind::Pass, "f", "a"),
            ("t3", TransitionKind::Pass, "f", "b"),
            ("t4", TransitionKind::Pass, "a", "j"),
            ("t5", TransitionKind::Pass, "b", "j"),
            ("t6", TransitionKind::Incoming, "j", "c"),
            ("t7", TransitionKind::Pass, "c", "z"),
        ] {
            p.transitions.push(NibmTransition::new(id, k, s, t));
        }
        p
    }
}
