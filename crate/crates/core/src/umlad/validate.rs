//! Degree and reachability rules for the activity diagram fragment.

use super::{UmlActivity, UmlNodeKind};
use crate::report::{StructuralError, ValidationReport};
use std::collections::BTreeSet;

pub const RULES: &[&str] = &[
    "umlad.initial-count",
    "umlad.action-name",
    "umlad.action-inflow",
    "umlad.action-outflow",
    "umlad.decision-fork-inflow",
    "umlad.decision-fork-outflow",
    "umlad.merge-join-inflow",
    "umlad.merge-join-outflow",
    "umlad.initial-degree",
    "umlad.final-degree",
    "umlad.guard-placement",
    "umlad.partition-unresolved",
    "umlad.unreachable",
];

pub fn validate_umlad(model: &UmlActivity) -> Result<ValidationReport, StructuralError> {
    let idx = model.index()?;
    let mut report = ValidationReport::new();

    let initials: Vec<usize> = model
        .nodes
        .iter()
        .enumerate()
        .filter(|(_, n)| n.kind == UmlNodeKind::InitialNode)
        .map(|(i, _)| i)
        .collect();
    if initials.len() != 1 {
        report.push(
            "process",
            "umlad.initial-count",
            format!("expected exactly one InitialNode, found {}", initials.len()),
        );
    }

    let mut degree_broken: BTreeSet<usize> = BTreeSet::new();
    for (i, node) in model.nodes.iter().enumerate() {
        let ins = idx.in_edges[i].len();
        let outs = idx.out_edges[i].len();
        let mut broken = true;
        match node.kind {
            UmlNodeKind::Action => {
                if node.name.as_deref().is_none_or(str::is_empty) {
                    report.push(
                        &node.id,
                        "umlad.action-name",
                        "action name must be non-empty",
                    );
                }
                if ins != 1 {
                    let msg = if ins == 0 {
                        "action has no in-edge"
                    } else {
                        "action fan-in"
                    };
                    report.push(&node.id, "umlad.action-inflow", msg);
                } else if outs != 1 {
                    let msg = if outs == 0 {
                        "action has no out-edge"
                    } else {
                        "action fan-out"
                    };
                    report.push(&node.id, "umlad.action-outflow", msg);
                } else {
                    broken = false;
                }
            }
            UmlNodeKind::DecisionNode | UmlNodeKind::ForkNode => {
                if ins != 1 {
                    report.push(
                        &node.id,
                        "umlad.decision-fork-inflow",
                        format!(
                            "{} requires exactly 1 in-edge, found {ins}",
                            node.kind.as_str()
                        ),
                    );
                } else if outs < 2 {
                    report.push(
                        &node.id,
                        "umlad.decision-fork-outflow",
                        format!(
                            "{} requires >=2 out-edges, found {outs}",
                            node.kind.as_str()
                        ),
                    );
                } else {
                    broken = false;
                }
            }
            UmlNodeKind::MergeNode | UmlNodeKind::JoinNode => {
                if ins < 2 {
                    report.push(
                        &node.id,
                        "umlad.merge-join-inflow",
                        format!("{} requires >=2 in-edges, found {ins}", node.kind.as_str()),
                    );
                } else if outs != 1 {
                    report.push(
                        &node.id,
                        "umlad.merge-join-outflow",
                        format!(
                            "{} requires exactly 1 out-edge, found {outs}",
                            node.kind.as_str()
                        ),
                    );
                } else {
                    broken = false;
                }
            }
            UmlNodeKind::InitialNode => {
                if ins != 0 || outs != 1 {
                    report.push(
                        &node.id,
                        "umlad.initial-degree",
                        format!(
                            "InitialNode must have 0 in-edges and 1 out-edge, found {ins}/{outs}"
                        ),
                    );
                } else {
                    broken = false;
                }
            }
            UmlNodeKind::ActivityFinalNode => {
                if ins < 1 || outs != 0 {
                    report.push(
                        &node.id,
                        "umlad.final-degree",
                        format!("ActivityFinalNode must have >=1 in-edge and 0 out-edges, found {ins}/{outs}"),
                    );
                } else {
                    broken = false;
                }
            }
        }
        if broken {
            degree_broken.insert(i);
        }
        if let Some(p) = &node.partition {
            if !idx.part_pos.contains_key(p) {
                report.push(
                    &node.id,
                    "umlad.partition-unresolved",
                    format!("partition {p} is not declared in the activity"),
                );
            }
        }
    }

    for e in &model.edges {
        if e.guard.is_some() {
            let src = &model.nodes[idx.node_pos[&e.source]];
            if src.kind != UmlNodeKind::DecisionNode {
                report.push(
                    &e.id,
                    "umlad.guard-placement",
                    "guard only on decision edges",
                );
            }
        }
    }

    if initials.len() == 1 {
        let n = model.nodes.len();
        let mut reached = vec![false; n];
        let mut stack = vec![initials[0]];
        reached[initials[0]] = true;
        while let Some(i) = stack.pop() {
            for &e in &idx.out_edges[i] {
                let j = idx.node_pos[&model.edges[e].target];
                if !reached[j] {
                    reached[j] = true;
                    stack.push(j);
                }
            }
        }
        for (i, node) in model.nodes.iter().enumerate() {
            if !reached[i] && !degree_broken.contains(&i) {
                report.push(
                    &node.id,
                    "umlad.unreachable",
                    "unreachable from initial node",
                );
            }
        }
    }

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::super::testutil::*;
    use super::super::*;
    use super::*;

    #[test]
    fn minimal_and_full_models_are_valid() {
        for m in [minimal(), full_vocabulary()] {
            let r = validate_umlad(&m).unwrap();
            assert!(r.is_empty(), "unexpected violations: {r}");
        }
    }

    #[test]
    fn join_with_one_in_edge() {
        let mut m = minimal();
        m.nodes.push(UmlNode::new("j", UmlNodeKind::JoinNode));
        m.edges[1].target = "j".into();
        m.edges.push(UmlControlFlow {
            id: "e3".into(),
            source: "j".into(),
            target: "f".into(),
            guard: None,
        });
        let r = validate_umlad(&m).unwrap();
        assert_eq!(r.len(), 1, "{r}");
        assert_eq!(r.violations[0].rule, "umlad.merge-join-inflow");
    }

    #[test]
    fn action_fan_out() {
        let mut m = minimal();
        m.nodes
            .push(UmlNode::new("f2", UmlNodeKind::ActivityFinalNode));
        m.edges.push(UmlControlFlow {
            id: "e3".into(),
            source: "a".into(),
            target: "f2".into(),
            guard: None,
        });
        let r = validate_umlad(&m).unwrap();
        assert_eq!(r.len(), 1, "{r}");
        assert_eq!(r.violations[0].rule, "umlad.action-outflow");
        assert!(r.violations[0].message.contains("action fan-out"));
    }

    #[test]
    fn decision_with_single_out_edge() {
        let mut m = minimal();
        m.nodes.push(UmlNode::new("d", UmlNodeKind::DecisionNode));
        m.edges[1].target = "d".into();
        m.edges.push(UmlControlFlow {
            id: "e3".into(),
            source: "d".into(),
            target: "f".into(),
            guard: None,
        });
        let r = validate_umlad(&m).unwrap();
        assert_eq!(r.len(), 1, "{r}");
        assert_eq!(r.violations[0].rule, "umlad.decision-fork-outflow");
    }
}
