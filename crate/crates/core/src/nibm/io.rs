//! JSON form of the notation-independent process.

use super::{
    EnterpriseContext, NibmNode, NibmProcess, NibmTransition, NodeKind, Performer,
    PerformerReferent, TransitionKind,
};
use crate::interchange::{ReadError, WriteError};
use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize)]
struct Doc {
    notation: String,
    process: ProcessDto,
}

#[derive(Serialize, Deserialize)]
struct ProcessDto {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    id: String,
    name: String,
    #[serde(default)]
    nodes: Vec<NodeDto>,
    #[serde(default)]
    transitions: Vec<TransitionDto>,
    #[serde(default)]
    performers: Vec<PerformerDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    context: Option<ContextDto>,
}

#[derive(Serialize, Deserialize)]
struct NodeDto {
    id: String,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    performer: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct TransitionDto {
    id: String,
    kind: String,
    source: String,
    target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    guard: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct PerformerDto {
    id: String,
    kind: String,
    name: String,
}

#[derive(Serialize, Deserialize)]
struct ContextDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    enterprise: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    inputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    outputs: Vec<String>,
}

pub fn read_nibm(text: &str) -> Result<NibmProcess, ReadError> {
    let doc: Doc = serde_json::from_str(text).map_err(|e| ReadError::Malformed(e.to_string()))?;
    if doc.notation != "nibm" {
        return Err(ReadError::NotationMismatch {
            expected: "nibm",
            found: doc.notation,
        });
    }
    let p = doc.process;
    let mut model = NibmProcess::new(p.name);
    model.id = if p.id.is_empty() {
        model.name.clone()
    } else {
        p.id
    };

    for (i, n) in p.nodes.iter().enumerate() {
        let kind = NodeKind::parse(&n.kind).ok_or_else(|| ReadError::IllegalAttribute {
            attribute: "kind",
            path: format!("nodes[{i}]"),
            value: n.kind.clone(),
        })?;
        model.nodes.push(NibmNode {
            id: n.id.clone(),
            kind,
            label: n.label.clone(),
            performer: n.performer.clone(),
        });
    }
    for (i, t) in p.transitions.iter().enumerate() {
        let kind = TransitionKind::parse(&t.kind).ok_or_else(|| ReadError::IllegalAttribute {
            attribute: "kind",
            path: format!("transitions[{i}]"),
            value: t.kind.clone(),
        })?;
        model.transitions.push(NibmTransition {
            id: t.id.clone(),
            kind,
            source: t.source.clone(),
            target: t.target.clone(),
            guard: t.guard.clone(),
        });
    }
    for (i, perf) in p.performers.iter().enumerate() {
        let referent =
            PerformerReferent::from_parts(&perf.kind, perf.name.clone()).ok_or_else(|| {
                ReadError::IllegalAttribute {
                    attribute: "kind",
                    path: format!("performers[{i}]"),
                    value: perf.kind.clone(),
                }
            })?;
        model.performers.push(Performer {
            id: perf.id.clone(),
            referent,
        });
    }
    if let Some(c) = p.context {
        model.context = Some(EnterpriseContext {
            enterprise: c.enterprise,
            inputs: c.inputs,
            outputs: c.outputs,
        });
    }

    // surface structural defects as parse errors with a path
    if let Err(e) = model.index() {
        return Err(structural_to_read(&model, e));
    }
    Ok(model)
}

fn structural_to_read(model: &NibmProcess, e: crate::report::StructuralError) -> ReadError {
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
            let i = model
                .transitions
                .iter()
                .rposition(|t| t.id == id)
                .unwrap_or(0);
            ReadError::DuplicateId {
                id,
                path: format!("transitions[{i}]"),
            }
        }
        S::DuplicatePerformer(id) => {
            let i = model
                .performers
                .iter()
                .rposition(|p| p.id == id)
                .unwrap_or(0);
            ReadError::DuplicateId {
                id,
                path: format!("performers[{i}]"),
            }
        }
        S::UnresolvedSource { transition, node } => {
            let i = model
                .transitions
                .iter()
                .position(|t| t.id == transition)
                .unwrap_or(0);
            ReadError::DanglingSource {
                id: node,
                path: format!("transitions[{i}]"),
            }
        }
        S::UnresolvedTarget { transition, node } => {
            let i = model
                .transitions
                .iter()
                .position(|t| t.id == transition)
                .unwrap_or(0);
            ReadError::DanglingTarget {
                id: node,
                path: format!("transitions[{i}]"),
            }
        }
    }
}

pub fn write_nibm(model: &NibmProcess) -> Result<String, WriteError> {
    model.index()?;
    let doc = Doc {
        notation: "nibm".into(),
        process: ProcessDto {
            id: if model.id == model.name {
                String::new()
            } else {
                model.id.clone()
            },
            name: model.name.clone(),
            nodes: model
                .nodes
                .iter()
                .map(|n| NodeDto {
                    id: n.id.clone(),
                    kind: n.kind.as_str().into(),
                    label: n.label.clone(),
                    performer: n.performer.clone(),
                })
                .collect(),
            transitions: model
                .transitions
                .iter()
                .map(|t| TransitionDto {
                    id: t.id.clone(),
                    kind: t.kind.as_str().into(),
                    source: t.source.clone(),
                    target: t.target.clone(),
                    guard: t.guard.clone(),
                })
                .collect(),
            performers: model
                .performers
                .iter()
                .map(|p| PerformerDto {
                    id: p.id.clone(),
                    kind: p.referent.kind_str().into(),
                    name: p.referent.name().into(),
                })
                .collect(),
            context: model.context.as_ref().map(|c| ContextDto {
                enterprise: c.enterprise.clone(),
                inputs: c.inputs.clone(),
                outputs: c.outputs.clone(),
            }),
        },
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("nibm serialization");
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::super::testutil::minimal_chain;
    use super::*;

    #[test]
    fn round_trip_minimal() {
        let m = minimal_chain();
        let text = write_nibm(&m).unwrap();
        let back = read_nibm(&text).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn round_trip_with_context_and_performers() {
        let mut m = minimal_chain();
        m.performers.push(crate::nibm::Performer {
            id: "p1".into(),
            referent: crate::nibm::PerformerReferent::Qualification("Auditor".into()),
        });
        m.nodes[1].performer = Some("p1".into());
        m.context = Some(crate::nibm::EnterpriseContext {
            enterprise: Some("Acme".into()),
            inputs: vec!["order".into()],
            outputs: vec!["invoice".into()],
        });
        let text = write_nibm(&m).unwrap();
        assert_eq!(read_nibm(&text).unwrap(), m);
    }

    #[test]
    fn rejects_malformed_json() {
        let err = read_nibm("{\"notation\":").unwrap_err();
        assert!(matches!(err, ReadError::Malformed(_)));
    }

    #[test]
    fn rejects_bad_kind() {
        let text =
            r#"{"notation":"nibm","process":{"name":"p","nodes":[{"id":"1","kind":"Gateway"}]}}"#;
        let err = read_nibm(text).unwrap_err();
        assert!(err.to_string().contains("illegal kind value at nodes[0]"));
    }

    #[test]
    fn rejects_wrong_tag() {
        let text = r#"{"notation":"grade-bm","process":{"name":"p"}}"#;
        assert!(matches!(
            read_nibm(text).unwrap_err(),
            ReadError::NotationMismatch { .. }
        ));
    }

    #[test]
    fn writer_refuses_duplicate_ids() {
        let mut m = minimal_chain();
        m.nodes[2].id = m.nodes[0].id.clone();
        assert!(write_nibm(&m).is_err());
    }

    #[test]
    fn dangling_target_names_path() {
        let text = r#"{"notation":"nibm","process":{"name":"p",
            "nodes":[{"id":"1","kind":"Start"}],
            "transitions":[{"id":"t","kind":"Pass","source":"1","target":"t9"}]}}"#;
        let err = read_nibm(text).unwrap_err();
        assert!(err.to_string().contains("dangling target t9"));
    }
}
