//! Well-formedness rules for GRADE-style processes.
//!
//! These rules are intentionally weaker than the independent metamodel's:
//! this validator checks the notation's own invariants, and anything that
//! only matters after projection (a task that never reaches an end, say)
//! is caught by the projection result check instead.

use super::{GateAttr, GradeElem, GradeProcess};
use crate::report::{StructuralError, ValidationReport};
use std::collections::BTreeSet;

pub const RULES: &[&str] = &[
    "grade.start-count",
    "grade.triggering-inflow",
    "grade.branching-outflow",
    "grade.guards-placement",
    "grade.guard-flow",
    "grade.flow-into-start",
    "grade.flow-from-end",
    "grade.performer-unresolved",
    "grade.task-name",
    "grade.unreachable",
];

pub fn validate_grade(model: &GradeProcess) -> Result<ValidationReport, StructuralError> {
    let idx = model.index()?;
    let mut report = ValidationReport::new();

    if model.starts.len() != 1 {
        report.push(
            "process",
            "grade.start-count",
            format!("expected exactly one start, found {}", model.starts.len()),
        );
    }

    let mut degree_broken: BTreeSet<&str> = BTreeSet::new();
    for task in &model.tasks {
        if task.name.is_empty() {
            report.push(&task.id, "grade.task-name", "task name must be non-empty");
        }
        let ins = idx.inflow_count(&task.id);
        let outs = idx.outflow_count(&task.id);
        let trig_ok = match task.triggering {
            GateAttr::None => ins <= 1,
            GateAttr::Or | GateAttr::And => ins >= 2,
        };
        if !trig_ok {
            degree_broken.insert(&task.id);
            report.push(
                &task.id,
                "grade.triggering-inflow",
                format!(
                    "triggering {} is inconsistent with {ins} inflows",
                    task.triggering.as_str()
                ),
            );
        }
        let branch_ok = match task.branching {
            GateAttr::None => outs <= 1,
            GateAttr::Or | GateAttr::And => outs >= 2,
        };
        if !branch_ok {
            degree_broken.insert(&task.id);
            report.push(
                &task.id,
                "grade.branching-outflow",
                format!(
                    "branching {} is inconsistent with {outs} outflows",
                    task.branching.as_str()
                ),
            );
        }
        if !task.guards.is_empty() && task.branching != GateAttr::Or {
            report.push(
                &task.id,
                "grade.guards-placement",
                "guards are only allowed on tasks with branching OR",
            );
        }
        for flow_id in task.guards.keys() {
            let owned = idx
                .outflows
                .get(&task.id)
                .is_some_and(|flows| flows.iter().any(|&f| model.flows[f].id == *flow_id));
            if !owned {
                report.push(
                    &task.id,
                    "grade.guard-flow",
                    format!(
                        "guard refers to {flow_id}, which is not an outgoing flow of this task"
                    ),
                );
            }
        }
        if let Some(p) = &task.performer {
            if !idx.perf_pos.contains_key(p) {
                report.push(
                    &task.id,
                    "grade.performer-unresolved",
                    format!("performer {p} is not declared in the process"),
                );
            }
        }
    }

    for flow in &model.flows {
        if matches!(idx.pos.get(&flow.target), Some(GradeElem::Start(_))) {
            report.push(
                &flow.id,
                "grade.flow-into-start",
                "flows may not enter a start point",
            );
        }
        if matches!(idx.pos.get(&flow.source), Some(GradeElem::End(_))) {
            report.push(
                &flow.id,
                "grade.flow-from-end",
                "flows may not leave an end point",
            );
        }
    }

    if model.starts.len() == 1 {
        let mut reached: BTreeSet<&str> = BTreeSet::new();
        let mut stack = vec![model.starts[0].id.as_str()];
        reached.insert(model.starts[0].id.as_str());
        while let Some(id) = stack.pop() {
            for &f in idx.outflows.get(id).into_iter().flatten() {
                let tgt = model.flows[f].target.as_str();
                if reached.insert(tgt) {
                    stack.push(tgt);
                }
            }
        }
        for task in &model.tasks {
            if !reached.contains(task.id.as_str()) && !degree_broken.contains(task.id.as_str()) {
                report.push(&task.id, "grade.unreachable", "unreachable from start");
            }
        }
        for end in &model.ends {
            if !reached.contains(end.id.as_str()) {
                report.push(&end.id, "grade.unreachable", "unreachable from start");
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
    fn minimal_and_order_processes_are_valid() {
        for m in [minimal(), order_process()] {
            let r = validate_grade(&m).unwrap();
            assert!(r.is_empty(), "unexpected violations: {r}");
        }
    }

    #[test]
    fn triggering_and_with_one_inflow() {
        let mut p = minimal();
        p.tasks[0].triggering = GateAttr::And;
        let r = validate_grade(&p).unwrap();
        assert_eq!(r.len(), 1, "{r}");
        assert_eq!(r.violations[0].rule, "grade.triggering-inflow");
    }

    #[test]
    fn three_inflows_with_triggering_or_is_fine() {
        let mut p = order_process();
        // add one more path into "Ship goods"
        p.tasks.push(GradeTask::new("t6", "Expedite"));
        p.tasks[1].branching = GateAttr::Or;
        p.flows.push(GradeFlow {
            id: "f8".into(),
            source: "t2".into(),
            target: "t6".into(),
        });
        p.flows.push(GradeFlow {
            id: "f9".into(),
            source: "t6".into(),
            target: "t4".into(),
        });
        let r = validate_grade(&p).unwrap();
        assert!(r.is_empty(), "{r}");
        assert_eq!(p.index().unwrap().inflow_count("t4"), 3);
    }

    #[test]
    fn unreachable_task_is_flagged() {
        let mut p = minimal();
        p.tasks.push(GradeTask::new("x", "X"));
        p.flows.push(GradeFlow {
            id: "f3".into(),
            source: "x".into(),
            target: "x".into(),
        });
        let r = validate_grade(&p).unwrap();
        assert_eq!(r.len(), 1, "{r}");
        assert_eq!(r.violations[0].rule, "grade.unreachable");
        assert!(r.violations[0].message.contains("unreachable from start"));
    }

    #[test]
    fn guards_on_and_branching_are_flagged() {
        let mut p = minimal();
        p.tasks[0].branching = GateAttr::And;
        p.tasks[0].guards.insert("f2".into(), "oops".into());
        p.ends.push(GradeEnd { id: "e2".into() });
        p.flows.push(GradeFlow {
            id: "f3".into(),
            source: "a".into(),
            target: "e2".into(),
        });
        let r = validate_grade(&p).unwrap();
        assert_eq!(r.len(), 1, "{r}");
        assert_eq!(r.violations[0].rule, "grade.guards-placement");
    }
}
