//! JSON reader and writer for the UML-AD interchange form.
//!
//! Guard placement is checked while reading: node kinds are known by the
//! time edges are built, so a guard anywhere but a decision out-edge is a
//! parse error, not a validation finding.

use super::{UmlActivity, UmlControlFlow, UmlNode, UmlNodeKind, UmlPartition};
use crate::interchange::{ReadError, WriteError};
use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize)]
struct Doc {
    notation: String,
    process: ActivityDto,
}

#[derive(Serialize, Deserialize)]
struct ActivityDto {
    name: String,
    #[serde(default)]
    nodes: Vec<NodeDto>,
    #[serde(default)]
    edges: Vec<EdgeDto>,
    #[serde(default)]
    partitions: Vec<PartitionDto>,
}

#[derive(Serialize, Deserialize)]
struct NodeDto {
    id: String,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    partition: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct EdgeDto {
    id: String,
    source: String,
    target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    guard: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct PartitionDto {
    id: String,
    name: String,
    kind: String,
}

const PARTITION_KINDS: &[&str] = &["Resource", "OrganizationalUnit", "Role", "Qualification"];

pub fn read_umlad(text: &str) -> Result<UmlActivity, ReadError> {
    let doc: Doc = serde_json::from_str(text).map_err(|e| ReadError::Malformed(e.to_string()))?;
    if doc.notation != "uml-ad" {
        return Err(ReadError::NotationMismatch {
            expected: "uml-ad",
            found: doc.notation,
        });
    }
    let p = doc.process;
    let mut model = UmlActivity::new(p.name);

    for (i, n) in p.nodes.iter().enumerate() {
        let kind = UmlNodeKind::parse(&n.kind).ok_or_else(|| ReadError::IllegalAttribute {
            attribute: "kind",
            path: format!("nodes[{i}]"),
            value: n.kind.clone(),
        })?;
        model.nodes.push(UmlNode {
            id: n.id.clone(),
            kind,
            name: n.name.clone(),
            partition: n.partition.clone(),
        });
    }
    for e in &p.edges {
        model.edges.push(UmlControlFlow {
            id: e.id.clone(),
            source: e.source.clone(),
            target: e.target.clone(),
            guard: e.guard.clone(),
        });
    }
    for (i, part) in p.partitions.iter().enumerate() {
        if !PARTITION_KINDS.contains(&part.kind.as_str()) {
            return Err(ReadError::IllegalAttribute {
                attribute: "kind",
                path: format!("partitions[{i}]"),
                value: part.kind.clone(),
            });
        }
        model.partitions.push(UmlPartition {
            id: part.id.clone(),
            name: part.name.clone(),
            kind: part.kind.clone(),
        });
    }

    let idx = match model.index() {
        Ok(idx) => idx,
        Err(e) => return Err(structural_to_read(&model, e)),
    };
    for (i, e) in model.edges.iter().enumerate() {
        if e.guard.is_some() {
            let src = &model.nodes[idx.node_pos[&e.source]];
            if src.kind != UmlNodeKind::DecisionNode {
                return Err(ReadError::GuardPlacement {
                    path: format!("edges[{i}]"),
                });
            }
        }
    }
    Ok(model)
}

fn structural_to_read(model: &UmlActivity, e: crate::report::StructuralError) -> ReadError {
    use crate::report::StructuralError as S;
    match e {
        S::DuplicateNode(id) => {
            let i = model.nodes.iter().rposition(|n| n.id == id).unwrap_or(0);
            ReadError::DuplicateId {
                id,
                path: format!("nodes[{i}]"),
            }
        }
        S::DuplicateTransition(id) => {
            let i = model.edges.iter().rposition(|x| x.id == id).unwrap_or(0);
            ReadError::DuplicateId {
                id,
                path: format!("edges[{i}]"),
            }
        }
        S::DuplicatePerformer(id) => {
            let i = model
                .partitions
                .iter()
                .rposition(|x| x.id == id)
                .unwrap_or(0);
            ReadError::DuplicateId {
                id,
                path: format!("partitions[{i}]"),
            }
        }
        S::UnresolvedSource { transition, node } => {
            let i = model
                .edges
                .iter()
                .position(|x| x.id == transition)
                .unwrap_or(0);
            ReadError::DanglingSource {
                id: node,
                path: format!("edges[{i}]"),
            }
        }
        S::UnresolvedTarget { transition, node } => {
            let i = model
                .edges
                .iter()
                .position(|x| x.id == transition)
                .unwrap_or(0);
            ReadError::DanglingTarget {
                id: node,
                path: format!("edges[{i}]"),
            }
        }
    }
}

pub fn write_umlad(model: &UmlActivity) -> Result<String, WriteError> {
    model.index()?;
    let doc = Doc {
        notation: "uml-ad".into(),
        process: ActivityDto {
            name: model.name.clone(),
            nodes: model
                .nodes
                .iter()
                .map(|n| NodeDto {
                    id: n.id.clone(),
                    kind: n.kind.as_str().into(),
                    name: n.name.clone(),
                    partition: n.partition.clone(),
                })
                .collect(),
            edges: model
                .edges
                .iter()
                .map(|e| EdgeDto {
                    id: e.id.clone(),
                    source: e.source.clone(),
                    target: e.target.clone(),
                    guard: e.guard.clone(),
                })
                .collect(),
            partitions: model
                .partitions
                .iter()
                .map(|p| PartitionDto {
                    id: p.id.clone(),
                    name: p.name.clone(),
                    kind: p.kind.clone(),
                })
                .collect(),
        },
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("umlad serialization");
    s.push('\n');
    Ok(s)
}
