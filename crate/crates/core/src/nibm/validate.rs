//! Well-formedness rules for the notation-independent process graph.
//!
//! The rule ids below are stable and asserted by fault-injection tests;
//! renaming one is a breaking change.
//!
//! Degree discipline: tasks are strictly 1-in/1-out, all fan-in lives on
//! Merge/Join, all fan-out on Decision/Fork. Reachability rules skip
//! nodes that already carry a degree violation, otherwise a single broken
//! degree would cascade into a wall of reachability noise.

use super::{NibmProcess, NodeKind, TransitionKind};
use crate::report::{StructuralError, ValidationReport};
use std::collections::BTreeSet;

pub const RULES: &[&str] = &[
    "nibm.start-count",
    "nibm.stop-missing",
    "nibm.task-label",
    "nibm.performer-placement",
    "nibm.performer-unresolved",
    "nibm.guard-placement",
    "nibm.duplicate-else",
    "nibm.incoming-endpoints",
    "nibm.outgoing-endpoints",
    "nibm.task-inflow",
    "nibm.task-outflow",
    "nibm.unifier-inflow",
    "nibm.unifier-outflow",
    "nibm.brancher-inflow",
    "nibm.brancher-outflow",
    "nibm.start-degree",
    "nibm.stop-degree",
    "nibm.context-name",
    "nibm.unreachable",
    "nibm.no-path-to-stop",
];

pub fn validate_nibm(model: &NibmProcess) -> Result<ValidationReport, StructuralError> {
    let idx = model.index()?;
    let mut report = ValidationReport::new();

    let starts: Vec<usize> = model
        .nodes
        .iter()
        .enumerate()
        .filter(|(_, n)| n.kind == NodeKind::Start)
        .map(|(i, _)| i)
        .collect();
    if starts.len() != 1 {
        report.push(
            "process",
            "nibm.start-count",
            format!("expected exactly one Start node, found {}", starts.len()),
        );
    }
    if !model.nodes.iter().any(|n| n.kind == NodeKind::Stop) {
        report.push(
            "process",
            "nibm.stop-missing",
            "at least one Stop node is required",
        );
    }

    for node in &model.nodes {
        if node.kind == NodeKind::Task && node.label.as_deref().is_none_or(str::is_empty) {
            report.push(&node.id, "nibm.task-label", "task label must be non-empty");
        }
        if node.kind != NodeKind::Task && node.performer.is_some() {
            report.push(
                &node.id,
                "nibm.performer-placement",
                format!(
                    "performer reference on {} node; only tasks have performers",
                    node.kind.as_str()
                ),
            );
        }
        if let Some(p) = &node.performer {
            if !idx.perf_pos.contains_key(p) {
                report.push(
                    &node.id,
                    "nibm.performer-unresolved",
                    format!("performer {p} is not declared in the process"),
                );
            }
        }
    }

    for t in &model.transitions {
        let src = &model.nodes[idx.node_pos[&t.source]];
        let tgt = &model.nodes[idx.node_pos[&t.target]];
        if t.guard.is_some() && src.kind != NodeKind::Decision {
            report.push(
                &t.id,
                "nibm.guard-placement",
                "guard labels are only allowed on transitions leaving a Decision",
            );
        }
        match t.kind {
            TransitionKind::Incoming => {
                if !matches!(src.kind, NodeKind::Merge | NodeKind::Join)
                    || tgt.kind != NodeKind::Task
                {
                    report.push(
                        &t.id,
                        "nibm.incoming-endpoints",
                        format!(
                            "Incoming must connect a Merge/Join to a Task, found {} -> {}",
                            src.kind.as_str(),
                            tgt.kind.as_str()
                        ),
                    );
                }
            }
            TransitionKind::Outgoing => {
                if src.kind != NodeKind::Task
                    || !matches!(tgt.kind, NodeKind::Decision | NodeKind::Fork)
                {
                    report.push(
                        &t.id,
                        "nibm.outgoing-endpoints",
                        format!(
                            "Outgoing must connect a Task to a Decision/Fork, found {} -> {}",
                            src.kind.as_str(),
                            tgt.kind.as_str()
                        ),
                    );
                }
            }
            TransitionKind::Pass => {}
        }
    }

    // at most one else branch per decision
    for (i, node) in model.nodes.iter().enumerate() {
        if node.kind == NodeKind::Decision {
            let else_count = idx.outflows[i]
                .iter()
                .filter(|&&t| model.transitions[t].guard.as_deref() == Some("else"))
                .count();
            if else_count > 1 {
                report.push(
                    &node.id,
                    "nibm.duplicate-else",
                    format!(
                        "decision has {else_count} outflows marked else; at most one is allowed"
                    ),
                );
            }
        }
    }

    if let Some(ctx) = &model.context {
        if ctx.enterprise.as_deref() == Some("") {
            report.push(
                "process",
                "nibm.context-name",
                "enterprise name must be non-empty when present",
            );
        }
        for (what, names) in [("input", &ctx.inputs), ("output", &ctx.outputs)] {
            if names.iter().any(String::is_empty) {
                report.push(
                    "process",
                    "nibm.context-name",
                    format!("{what} names must be non-empty"),
                );
            }
        }
    }

    // degree rules; remember offenders so reachability can skip them
    let mut degree_broken: BTreeSet<usize> = BTreeSet::new();
    for (i, node) in model.nodes.iter().enumerate() {
        let ins = idx.inflows[i].len();
        let outs = idx.outflows[i].len();
        let mut broken = true;
        match node.kind {
            NodeKind::Task => {
                if ins != 1 {
                    let msg = if ins == 0 {
                        "task has no inflow".to_string()
                    } else {
                        "task fan-in without unification node".to_string()
                    };
                    report.push(&node.id, "nibm.task-inflow", msg);
                } else if outs != 1 {
                    let msg = if outs == 0 {
                        "task has no outflow".to_string()
                    } else {
                        "task fan-out without branching node".to_string()
                    };
                    report.push(&node.id, "nibm.task-outflow", msg);
                } else {
                    broken = false;
                }
            }
            NodeKind::Merge | NodeKind::Join => {
                if ins < 2 {
                    report.push(
                        &node.id,
                        "nibm.unifier-inflow",
                        format!(
                            "{} requires >=2 inflows, found {ins}",
                            node.kind.as_str().to_lowercase()
                        ),
                    );
                } else if outs != 1 {
                    report.push(
                        &node.id,
                        "nibm.unifier-outflow",
                        format!(
                            "{} requires exactly 1 outflow, found {outs}",
                            node.kind.as_str().to_lowercase()
                        ),
                    );
                } else {
                    broken = false;
                }
            }
            NodeKind::Decision | NodeKind::Fork => {
                if ins != 1 {
                    report.push(
                        &node.id,
                        "nibm.brancher-inflow",
                        format!(
                            "{} requires exactly 1 inflow, found {ins}",
                            node.kind.as_str().to_lowercase()
                        ),
                    );
                } else if outs < 2 {
                    report.push(
                        &node.id,
                        "nibm.brancher-outflow",
                        format!(
                            "{} requires >=2 outflows, found {outs}",
                            node.kind.as_str().to_lowercase()
                        ),
                    );
                } else {
                    broken = false;
                }
            }
            NodeKind::Start => {
                if ins != 0 || outs != 1 {
                    report.push(
                        &node.id,
                        "nibm.start-degree",
                        format!("start must have 0 inflows and 1 outflow, found {ins}/{outs}"),
                    );
                } else {
                    broken = false;
                }
            }
            NodeKind::Stop => {
                if ins < 1 || outs != 0 {
                    report.push(
                        &node.id,
                        "nibm.stop-degree",
                        format!("stop must have >=1 inflow and 0 outflows, found {ins}/{outs}"),
                    );
                } else {
                    broken = false;
                }
            }
        }
        if broken {
            degree_broken.insert(i);
        }
    }

    // reachability; forward needs the unique start, backward needs some
    // stop to aim for, and both skip degree-broken nodes
    let n = model.nodes.len();
    let has_stop = model.nodes.iter().any(|nd| nd.kind == NodeKind::Stop);
    let fwd = if starts.len() == 1 {
        let mut fwd = vec![false; n];
        let mut stack = vec![starts[0]];
        fwd[starts[0]] = true;
        while let Some(i) = stack.pop() {
            for &t in &idx.outflows[i] {
                let j = idx.node_pos[&model.transitions[t].target];
                if !fwd[j] {
                    fwd[j] = true;
                    stack.push(j);
                }
            }
        }
        Some(fwd)
    } else {
        None
    };
    let back = if has_stop {
        let mut back = vec![false; n];
        let mut stack: Vec<usize> = model
            .nodes
            .iter()
            .enumerate()
            .filter(|(_, nd)| nd.kind == NodeKind::Stop)
            .map(|(i, _)| i)
            .collect();
        for &i in &stack {
            back[i] = true;
        }
        while let Some(i) = stack.pop() {
            for &t in &idx.inflows[i] {
                let j = idx.node_pos[&model.transitions[t].source];
                if !back[j] {
                    back[j] = true;
                    stack.push(j);
                }
            }
        }
        Some(back)
    } else {
        None
    };
    for (i, node) in model.nodes.iter().enumerate() {
        if degree_broken.contains(&i) {
            continue;
        }
        if let Some(fwd) = &fwd {
            if !fwd[i] {
                report.push(&node.id, "nibm.unreachable", "unreachable from start");
                continue;
            }
        }
        if let Some(back) = &back {
            if !back[i] {
                report.push(&node.id, "nibm.no-path-to-stop", "cannot reach a stop");
            }
        }
    }

    Ok(report)
}
