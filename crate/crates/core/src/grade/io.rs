//! JSON reader and writer for the GRADE-BM-style interchange form.

use super::{
    GateAttr, GradeEnd, GradeFlow, GradePerformerRef, GradeProcess, GradeStart, GradeTask,
};
use crate::interchange::{ReadError, WriteError};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Serialize, Deserialize)]
struct Doc {
    notation: String,
    process: ProcessDto,
}

#[derive(Serialize, Deserialize)]
struct ProcessDto {
    name: String,
    #[serde(default)]
    tasks: Vec<TaskDto>,
    #[serde(default)]
    starts: Vec<PointDto>,
    #[serde(default)]
    ends: Vec<PointDto>,
    #[serde(default)]
    flows: Vec<FlowDto>,
    #[serde(default)]
    performers: Vec<PerformerDto>,
}

#[derive(Serialize, Deserialize)]
struct TaskDto {
    id: String,
    name: String,
    #[serde(default = "none_attr")]
    triggering: String,
    #[serde(default = "none_attr")]
    branching: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    performer: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    guards: BTreeMap<String, Option<String>>,
}

fn none_attr() -> String {
    "NONE".into()
}

#[derive(Serialize, Deserialize)]
struct PointDto {
    id: String,
}

#[derive(Serialize, Deserialize)]
struct FlowDto {
    id: String,
    source: String,
    target: String,
}

#[derive(Serialize, Deserialize)]
struct PerformerDto {
    id: String,
    kind: String,
    name: String,
}

const PERFORMER_KINDS: &[&str] = &["Resource", "OrganizationalUnit", "Role", "Qualification"];

pub fn read_grade(text: &str) -> Result<GradeProcess, ReadError> {
    let doc: Doc = serde_json::from_str(text).map_err(|e| ReadError::Malformed(e.to_string()))?;
    if doc.notation != "grade-bm" {
        return Err(ReadError::NotationMismatch {
            expected: "grade-bm",
            found: doc.notation,
        });
    }
    let p = doc.process;
    let mut model = GradeProcess::new(p.name);

    for (i, t) in p.tasks.iter().enumerate() {
        let triggering =
            GateAttr::parse(&t.triggering).ok_or_else(|| ReadError::IllegalAttribute {
                attribute: "triggering",
                path: format!("tasks[{i}]"),
                value: t.triggering.clone(),
            })?;
        let branching =
            GateAttr::parse(&t.branching).ok_or_else(|| ReadError::IllegalAttribute {
                attribute: "branching",
                path: format!("tasks[{i}]"),
                value: t.branching.clone(),
            })?;
        model.tasks.push(GradeTask {
            id: t.id.clone(),
            name: t.name.clone(),
            triggering,
            branching,
            performer: t.performer.clone(),
            guards: t
                .guards
                .iter()
                .filter_map(|(k, v)| v.clone().map(|text| (k.clone(), text)))
                .collect(),
        });
    }
    model.starts = p
        .starts
        .iter()
        .map(|s| GradeStart { id: s.id.clone() })
        .collect();
    model.ends = p
        .ends
        .iter()
        .map(|e| GradeEnd { id: e.id.clone() })
        .collect();
    model.flows = p
        .flows
        .iter()
        .map(|f| GradeFlow {
            id: f.id.clone(),
            source: f.source.clone(),
            target: f.target.clone(),
        })
        .collect();
    for (i, perf) in p.performers.iter().enumerate() {
        if !PERFORMER_KINDS.contains(&perf.kind.as_str()) {
            return Err(ReadError::IllegalAttribute {
                attribute: "kind",
                path: format!("performers[{i}]"),
                value: perf.kind.clone(),
            });
        }
        model.performers.push(GradePerformerRef {
            id: perf.id.clone(),
            kind: perf.kind.clone(),
            name: perf.name.clone(),
        });
    }

    if let Err(e) = model.index() {
        return Err(structural_to_read(&model, e));
    }
    Ok(model)
}

fn structural_to_read(model: &GradeProcess, e: crate::report::StructuralError) -> ReadError {
    use crate::report::StructuralError as S;
    match e {
        S::DuplicateNode(id) | S::DuplicateTransition(id) | S::DuplicatePerformer(id) => {
            let path = locate(model, &id);
            ReadError::DuplicateId { id, path }
        }
        S::UnresolvedSource { transition, node } => {
            let i = model
                .flows
                .iter()
                .position(|f| f.id == transition)
                .unwrap_or(0);
            ReadError::DanglingSource {
                id: node,
                path: format!("flows[{i}]"),
            }
        }
        S::UnresolvedTarget { transition, node } => {
            let i = model
                .flows
                .iter()
                .position(|f| f.id == transition)
                .unwrap_or(0);
            ReadError::DanglingTarget {
                id: node,
                path: format!("flows[{i}]"),
            }
        }
    }
}

fn locate(model: &GradeProcess, id: &str) -> String {
    if let Some(i) = model.tasks.iter().rposition(|t| t.id == id) {
        return format!("tasks[{i}]");
    }
    if let Some(i) = model.starts.iter().rposition(|s| s.id == id) {
        return format!("starts[{i}]");
    }
    if let Some(i) = model.ends.iter().rposition(|e| e.id == id) {
        return format!("ends[{i}]");
    }
    if let Some(i) = model.flows.iter().rposition(|f| f.id == id) {
        return format!("flows[{i}]");
    }
    if let Some(i) = model.performers.iter().rposition(|p| p.id == id) {
        return format!("performers[{i}]");
    }
    "process".into()
}

pub fn write_grade(model: &GradeProcess) -> Result<String, WriteError> {
    model.index()?;
    let doc = Doc {
        notation: "grade-bm".into(),
        process: ProcessDto {
            name: model.name.clone(),
            tasks: model
                .tasks
                .iter()
                .map(|t| TaskDto {
                    id: t.id.clone(),
                    name: t.name.clone(),
                    triggering: t.triggering.as_str().into(),
                    branching: t.branching.as_str().into(),
                    performer: t.performer.clone(),
                    guards: t
                        .guards
                        .iter()
                        .map(|(k, v)| (k.clone(), Some(v.clone())))
                        .collect(),
                })
                .collect(),
            starts: model
                .starts
                .iter()
                .map(|s| PointDto { id: s.id.clone() })
                .collect(),
            ends: model
                .ends
                .iter()
                .map(|e| PointDto { id: e.id.clone() })
                .collect(),
            flows: model
                .flows
                .iter()
                .map(|f| FlowDto {
                    id: f.id.clone(),
                    source: f.source.clone(),
                    target: f.target.clone(),
                })
                .collect(),
            performers: model
                .performers
                .iter()
                .map(|p| PerformerDto {
                    id: p.id.clone(),
                    kind: p.kind.clone(),
                    name: p.name.clone(),
                })
                .collect(),
        },
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("grade serialization");
    s.push('\n');
    Ok(s)
}
