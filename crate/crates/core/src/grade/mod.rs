//! Native metamodel for the GRADE-BM-style notation.
//!
//! The distinguishing trait of this notation is that flow unification and
//! branching are *attributes of the task*: a task with `triggering = OR`
//! waits for any one of its inflows, `AND` for all of them, and
//! symmetrically `branching` governs the outflows. There are no separate
//! gateway symbols; start and end points are the only non-task elements.

mod io;
mod validate;

pub use io::{read_grade, write_grade};
pub use validate::{validate_grade, RULES};

use crate::iso::{self, DiGraph, IsoOutcome};
use crate::report::StructuralError;
use std::collections::BTreeMap;

/// Triggering and branching share one value space. Each attribute holds
/// exactly one value, so a task that is both OR- and AND-triggered is
/// unrepresentable by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GateAttr {
    Or,
    And,
    #[default]
    None,
}

impl GateAttr {
    pub fn as_str(&self) -> &'static str {
        match self {
            GateAttr::Or => "OR",
            GateAttr::And => "AND",
            GateAttr::None => "NONE",
        }
    }

    pub fn parse(s: &str) -> Option<GateAttr> {
        Some(match s {
            "OR" => GateAttr::Or,
            "AND" => GateAttr::And,
            "NONE" => GateAttr::None,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradeTask {
    pub id: String,
    pub name: String,
    pub triggering: GateAttr,
    pub branching: GateAttr,
    /// Performer id into [`GradeProcess::performers`].
    pub performer: Option<String>,
    /// Guard text per outgoing flow id; only meaningful with
    /// `branching = OR`. The literal `else` marks the default branch.
    pub guards: BTreeMap<String, String>,
}

impl GradeTask {
    pub fn new(id: impl Into<String>, name: impl Into<String>) -> Self {
        GradeTask {
            id: id.into(),
            name: name.into(),
            triggering: GateAttr::None,
            branching: GateAttr::None,
            performer: None,
            guards: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradeFlow {
    pub id: String,
    pub source: String,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradeStart {
    pub id: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradeEnd {
    pub id: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradePerformerRef {
    pub id: String,
    /// Resource, OrganizationalUnit, Role or Qualification.
    pub kind: String,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradeProcess {
    pub name: String,
    pub tasks: Vec<GradeTask>,
    pub starts: Vec<GradeStart>,
    pub ends: Vec<GradeEnd>,
    pub flows: Vec<GradeFlow>,
    pub performers: Vec<GradePerformerRef>,
}

impl GradeProcess {
    pub fn new(name: impl Into<String>) -> Self {
        GradeProcess {
            name: name.into(),
            tasks: Vec::new(),
            starts: Vec::new(),
            ends: Vec::new(),
            flows: Vec::new(),
            performers: Vec::new(),
        }
    }

    pub fn element_ids(&self) -> Vec<String> {
        self.tasks
            .iter()
            .map(|t| t.id.clone())
            .chain(self.starts.iter().map(|s| s.id.clone()))
            .chain(self.ends.iter().map(|e| e.id.clone()))
            .chain(self.flows.iter().map(|f| f.id.clone()))
            .chain(self.performers.iter().map(|p| p.id.clone()))
            .collect()
    }

    pub(crate) fn index(&self) -> Result<GradeIndex, StructuralError> {
        let mut pos: BTreeMap<String, GradeElem> = BTreeMap::new();
        for (i, t) in self.tasks.iter().enumerate() {
            if pos.insert(t.id.clone(), GradeElem::Task(i)).is_some() {
                return Err(StructuralError::DuplicateNode(t.id.clone()));
            }
        }
        for (i, s) in self.starts.iter().enumerate() {
            if pos.insert(s.id.clone(), GradeElem::Start(i)).is_some() {
                return Err(StructuralError::DuplicateNode(s.id.clone()));
            }
        }
        for (i, e) in self.ends.iter().enumerate() {
            if pos.insert(e.id.clone(), GradeElem::End(i)).is_some() {
                return Err(StructuralError::DuplicateNode(e.id.clone()));
            }
        }
        let mut flow_pos = BTreeMap::new();
        for (i, f) in self.flows.iter().enumerate() {
            if flow_pos.insert(f.id.clone(), i).is_some() {
                return Err(StructuralError::DuplicateTransition(f.id.clone()));
            }
        }
        let mut perf_pos = BTreeMap::new();
        for (i, p) in self.performers.iter().enumerate() {
            if perf_pos.insert(p.id.clone(), i).is_some() {
                return Err(StructuralError::DuplicatePerformer(p.id.clone()));
            }
        }
        let mut inflows: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        let mut outflows: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, f) in self.flows.iter().enumerate() {
            if !pos.contains_key(&f.source) {
                return Err(StructuralError::UnresolvedSource {
                    transition: f.id.clone(),
                    node: f.source.clone(),
                });
            }
            if !pos.contains_key(&f.target) {
                return Err(StructuralError::UnresolvedTarget {
                    transition: f.id.clone(),
                    node: f.target.clone(),
                });
            }
            outflows.entry(f.source.clone()).or_default().push(i);
            inflows.entry(f.target.clone()).or_default().push(i);
        }
        Ok(GradeIndex {
            pos,
            perf_pos,
            inflows,
            outflows,
        })
    }

    /// Digraph view for isomorphism checks: node labels carry element
    /// type, name, attributes and performer referent; edge labels carry
    /// guard text.
    pub(crate) fn to_digraph(&self) -> Result<DiGraph, StructuralError> {
        let idx = self.index()?;
        let mut ids = Vec::new();
        let mut labels = Vec::new();
        let mut node_at: BTreeMap<&str, usize> = BTreeMap::new();
        for t in &self.tasks {
            node_at.insert(&t.id, ids.len());
            ids.push(t.id.clone());
            let performer = t
                .performer
                .as_deref()
                .and_then(|p| idx.perf_pos.get(p))
                .map(|&i| format!("{}:{}", self.performers[i].kind, self.performers[i].name))
                .unwrap_or_default();
            labels.push(format!(
                "task|{}|{}|{}|{}",
                t.name,
                t.triggering.as_str(),
                t.branching.as_str(),
                performer
            ));
        }
        for s in &self.starts {
            node_at.insert(&s.id, ids.len());
            ids.push(s.id.clone());
            labels.push("start".into());
        }
        for e in &self.ends {
            node_at.insert(&e.id, ids.len());
            ids.push(e.id.clone());
            labels.push("end".into());
        }
        let guard_of = |f: &GradeFlow| -> String {
            idx.pos
                .get(&f.source)
                .and_then(|el| match el {
                    GradeElem::Task(i) => self.tasks[*i].guards.get(&f.id).cloned(),
                    _ => None,
                })
                .unwrap_or_default()
        };
        let edges = self
            .flows
            .iter()
            .map(|f| {
                (
                    node_at[f.source.as_str()],
                    node_at[f.target.as_str()],
                    guard_of(f),
                )
            })
            .collect();
        Ok(DiGraph { ids, labels, edges })
    }
}

/// Structure-level isomorphism between two processes of this notation.
pub fn isomorphic_grade(a: &GradeProcess, b: &GradeProcess) -> Result<IsoOutcome, StructuralError> {
    Ok(iso::isomorphic(&a.to_digraph()?, &b.to_digraph()?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum GradeElem {
    Task(usize),
    Start(usize),
    End(usize),
}

pub(crate) struct GradeIndex {
    pub pos: BTreeMap<String, GradeElem>,
    pub perf_pos: BTreeMap<String, usize>,
    pub inflows: BTreeMap<String, Vec<usize>>,
    pub outflows: BTreeMap<String, Vec<usize>>,
}

impl GradeIndex {
    pub fn inflow_count(&self, id: &str) -> usize {
        self.inflows.get(id).map_or(0, Vec::len)
    }

    pub fn outflow_count(&self, id: &str) -> usize {
        self.outflows.get(id).map_or(0, Vec::len)
    }
}
