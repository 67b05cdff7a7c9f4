//! GRADE projections in both directions.
//!
//! Into the independent model, a task's triggering attribute becomes a
//! Merge/Join ahead of the task (wired through an Incoming transition)
//! and its branching attribute a Decision/Fork behind it (wired through
//! an Outgoing transition); flows are re-anchored at those synthesized
//! nodes. Out of the independent model the same patterns are absorbed
//! back into task attributes; control chains that no task can absorb are
//! either an error or, with `allow_synthetic`, expanded with no-op tasks.

use super::project::{fire_rules, synth_id, ProjectionError};
use super::{Direction, ElementTemplate, MappingDefinition, MappingRule, MappingTrace};
use crate::grade::{
    validate_grade, GateAttr, GradeEnd, GradeFlow, GradePerformerRef, GradeProcess, GradeStart,
    GradeTask,
};
use crate::nibm::{
    validate_nibm, NibmNode, NibmProcess, NibmTransition, NodeKind, Performer, PerformerReferent,
    TransitionKind,
};
use std::collections::BTreeMap;

#[derive(Default)]
struct TaskPlan {
    task_node: Option<String>,
    unifier: Option<String>,
    brancher: Option<String>,
}

pub(super) fn grade_to_nibm(
    model: &GradeProcess,
    def: &MappingDefinition,
) -> Result<(NibmProcess, MappingTrace), ProjectionError> {
    let report = validate_grade(model)?;
    if !report.is_empty() {
        return Err(ProjectionError::SourceInvalid(report));
    }

    let mut out = NibmProcess::new(model.name.clone());
    let mut trace = MappingTrace::new(Direction::ToNibm);
    let mut performer_map: BTreeMap<&str, String> = BTreeMap::new();

    for p in &model.performers {
        let attrs = attr_map(&[("kind", &p.kind), ("name", &p.name)]);
        for rule in fire_rules(def, "PerformerRef", &attrs, &p.id)? {
            let mut produced = Vec::new();
            for (i, tpl) in rule.produces.iter().enumerate() {
                match tpl {
                    ElementTemplate::Performer => {
                        let id = synth_id(&p.id, &rule.id, i);
                        let referent = PerformerReferent::from_parts(&p.kind, p.name.clone())
                            .ok_or_else(|| ProjectionError::Template {
                                rule: rule.id.clone(),
                                detail: format!("unknown performer kind {:?}", p.kind),
                            })?;
                        out.performers.push(Performer {
                            id: id.clone(),
                            referent,
                        });
                        performer_map.insert(&p.id, id.clone());
                        produced.push(id);
                    }
                    other => {
                        return Err(unsupported(rule, other, "PerformerRef"));
                    }
                }
            }
            if !produced.is_empty() {
                trace.push(&p.id, &rule.id, produced);
            }
        }
    }

    let mut point_map: BTreeMap<&str, String> = BTreeMap::new();
    for (class, ids) in [
        (
            "Start",
            model
                .starts
                .iter()
                .map(|s| s.id.as_str())
                .collect::<Vec<_>>(),
        ),
        (
            "End",
            model.ends.iter().map(|e| e.id.as_str()).collect::<Vec<_>>(),
        ),
    ] {
        for id in ids {
            for rule in fire_rules(def, class, &BTreeMap::new(), id)? {
                let mut produced = Vec::new();
                for (i, tpl) in rule.produces.iter().enumerate() {
                    match tpl {
                        ElementTemplate::Node { kind, .. } => {
                            let nid = synth_id(id, &rule.id, i);
                            out.nodes.push(NibmNode::new(nid.clone(), *kind));
                            point_map.insert(id, nid.clone());
                            produced.push(nid);
                        }
                        other => return Err(unsupported(rule, other, class)),
                    }
                }
                if !produced.is_empty() {
                    trace.push(id, &rule.id, produced);
                }
            }
        }
    }

    let mut plans: BTreeMap<&str, TaskPlan> = BTreeMap::new();
    for task in &model.tasks {
        let mut attrs = attr_map(&[
            ("name", &task.name),
            ("triggering", task.triggering.as_str()),
            ("branching", task.branching.as_str()),
        ]);
        if let Some(p) = &task.performer {
            attrs.insert("performer".into(), p.clone());
        }
        let fired = fire_rules(def, "Task", &attrs, &task.id)?;
        let mut plan = TaskPlan::default();
        // (kind, id) of trigger/branch attachments, wired once the task
        // node exists
        let mut pending: Vec<(TransitionKind, String)> = Vec::new();
        for rule in fired {
            let mut produced = Vec::new();
            let mut created = 0usize;
            for (i, tpl) in rule.produces.iter().enumerate() {
                match tpl {
                    ElementTemplate::Node {
                        kind: NodeKind::Task,
                        copy_label,
                        copy_performer,
                    } => {
                        let id = match &plan.task_node {
                            Some(id) => id.clone(),
                            None => {
                                let id = synth_id(&task.id, &rule.id, i);
                                let mut node = NibmNode::new(id.clone(), NodeKind::Task);
                                if *copy_label {
                                    node.label = Some(task.name.clone());
                                }
                                if *copy_performer {
                                    node.performer = task
                                        .performer
                                        .as_deref()
                                        .and_then(|p| performer_map.get(p).cloned());
                                }
                                out.nodes.push(node);
                                plan.task_node = Some(id.clone());
                                created += 1;
                                id
                            }
                        };
                        produced.push(id);
                    }
                    ElementTemplate::Node {
                        kind: kind @ (NodeKind::Merge | NodeKind::Join),
                        ..
                    } => {
                        if plan.unifier.is_some() {
                            return Err(ProjectionError::Template {
                                rule: rule.id.clone(),
                                detail: "task already gained a unifier from another rule".into(),
                            });
                        }
                        let id = synth_id(&task.id, &rule.id, i);
                        out.nodes.push(NibmNode::new(id.clone(), *kind));
                        plan.unifier = Some(id.clone());
                        created += 1;
                        produced.push(id);
                    }
                    ElementTemplate::Node {
                        kind: kind @ (NodeKind::Decision | NodeKind::Fork),
                        ..
                    } => {
                        if plan.brancher.is_some() {
                            return Err(ProjectionError::Template {
                                rule: rule.id.clone(),
                                detail: "task already gained a brancher from another rule".into(),
                            });
                        }
                        let id = synth_id(&task.id, &rule.id, i);
                        out.nodes.push(NibmNode::new(id.clone(), *kind));
                        plan.brancher = Some(id.clone());
                        created += 1;
                        produced.push(id);
                    }
                    ElementTemplate::Transition {
                        kind: kind @ (TransitionKind::Incoming | TransitionKind::Outgoing),
                    } => {
                        let id = synth_id(&task.id, &rule.id, i);
                        pending.push((*kind, id.clone()));
                        created += 1;
                        produced.push(id);
                    }
                    other => return Err(unsupported(rule, other, "Task")),
                }
            }
            if created > 0 {
                trace.push(&task.id, &rule.id, produced);
            }
        }
        let task_node = plan
            .task_node
            .clone()
            .ok_or_else(|| ProjectionError::Template {
                rule: "<task rules>".into(),
                detail: format!("no fired rule produced the Task node for {}", task.id),
            })?;
        for (kind, id) in pending {
            let t = match kind {
                TransitionKind::Incoming => {
                    let unifier =
                        plan.unifier
                            .clone()
                            .ok_or_else(|| ProjectionError::Template {
                                rule: "<task rules>".into(),
                                detail: format!(
                                    "Incoming attachment for {} has no unifier",
                                    task.id
                                ),
                            })?;
                    NibmTransition::new(id, kind, unifier, task_node.clone())
                }
                TransitionKind::Outgoing => {
                    let brancher =
                        plan.brancher
                            .clone()
                            .ok_or_else(|| ProjectionError::Template {
                                rule: "<task rules>".into(),
                                detail: format!(
                                    "Outgoing attachment for {} has no brancher",
                                    task.id
                                ),
                            })?;
                    NibmTransition::new(id, kind, task_node.clone(), brancher)
                }
                TransitionKind::Pass => unreachable!(),
            };
            out.transitions.push(t);
        }
        plans.insert(&task.id, plan);
    }

    // flows last: their anchors depend on what the task rules synthesized
    for flow in &model.flows {
        for rule in fire_rules(def, "Flow", &BTreeMap::new(), &flow.id)? {
            let mut produced = Vec::new();
            for (i, tpl) in rule.produces.iter().enumerate() {
                match tpl {
                    ElementTemplate::Transition { kind } => {
                        let id = synth_id(&flow.id, &rule.id, i);
                        let source = plans
                            .get(flow.source.as_str())
                            .map(|p| p.brancher.clone().or_else(|| p.task_node.clone()).unwrap())
                            .unwrap_or_else(|| point_map[flow.source.as_str()].clone());
                        let target = plans
                            .get(flow.target.as_str())
                            .map(|p| p.unifier.clone().or_else(|| p.task_node.clone()).unwrap())
                            .unwrap_or_else(|| point_map[flow.target.as_str()].clone());
                        let mut t = NibmTransition::new(id.clone(), *kind, source, target);
                        t.guard = model
                            .tasks
                            .iter()
                            .find(|tk| tk.id == flow.source)
                            .and_then(|tk| tk.guards.get(&flow.id).cloned());
                        out.transitions.push(t);
                        produced.push(id);
                    }
                    other => return Err(unsupported(rule, other, "Flow")),
                }
            }
            if !produced.is_empty() {
                trace.push(&flow.id, &rule.id, produced);
            }
        }
    }

    let report = validate_nibm(&out)?;
    if !report.is_empty() {
        return Err(ProjectionError::ResultInvalid { report, trace });
    }
    Ok((out, trace))
}

/// Rules recognized structurally so the definition can be inverted. The
/// bare triggering rule doubles as the task's identity rule in traces.
struct InverseRules<'d> {
    trig: BTreeMap<NodeKind, &'d str>,
    trig_bare: &'d str,
    branch: BTreeMap<NodeKind, &'d str>,
    start: &'d str,
    end: &'d str,
    flow: &'d str,
    performer: &'d str,
}

fn produces_only_task(rule: &MappingRule) -> bool {
    rule.produces.len() == 1
        && matches!(
            rule.produces[0],
            ElementTemplate::Node {
                kind: NodeKind::Task,
                ..
            }
        )
}

fn produced_control_kind(rule: &MappingRule) -> Option<NodeKind> {
    rule.produces.iter().find_map(|t| match t {
        ElementTemplate::Node { kind, .. } if *kind != NodeKind::Task => Some(*kind),
        _ => None,
    })
}

impl<'d> InverseRules<'d> {
    fn trig_rule(&self, kind: NodeKind) -> Result<&'d str, ProjectionError> {
        self.trig
            .get(&kind)
            .copied()
            .ok_or(ProjectionError::NoInverseRule(
                "a Task rule producing this unifier kind",
            ))
    }

    fn branch_rule(&self, kind: NodeKind) -> Result<&'d str, ProjectionError> {
        self.branch
            .get(&kind)
            .copied()
            .ok_or(ProjectionError::NoInverseRule(
                "a Task rule producing this brancher kind",
            ))
    }

    fn build(def: &'d MappingDefinition) -> Result<Self, ProjectionError> {
        let mut trig = BTreeMap::new();
        let mut branch = BTreeMap::new();
        let mut trig_bare = None;
        let mut branch_bare = None;
        let mut start = None;
        let mut end = None;
        let mut flow = None;
        let mut performer = None;
        for rule in &def.rules {
            match rule.source_class.as_str() {
                "Task" => {
                    if produces_only_task(rule) {
                        let attrs = rule.guard.attributes();
                        if attrs.contains(&"triggering") && trig_bare.is_none() {
                            trig_bare = Some(rule.id.as_str());
                        } else if attrs.contains(&"branching") && branch_bare.is_none() {
                            branch_bare = Some(rule.id.as_str());
                        }
                    } else {
                        match produced_control_kind(rule) {
                            Some(k @ (NodeKind::Merge | NodeKind::Join)) => {
                                trig.entry(k).or_insert(rule.id.as_str());
                            }
                            Some(k @ (NodeKind::Decision | NodeKind::Fork)) => {
                                branch.entry(k).or_insert(rule.id.as_str());
                            }
                            _ => {}
                        }
                    }
                }
                "Start" => start = start.or(Some(rule.id.as_str())),
                "End" => end = end.or(Some(rule.id.as_str())),
                "Flow" => flow = flow.or(Some(rule.id.as_str())),
                "PerformerRef" => performer = performer.or(Some(rule.id.as_str())),
                _ => {}
            }
        }
        branch_bare.ok_or(ProjectionError::NoInverseRule("a bare Task branching rule"))?;
        Ok(InverseRules {
            trig,
            trig_bare: trig_bare.ok_or(ProjectionError::NoInverseRule(
                "a bare Task triggering rule",
            ))?,
            branch,
            start: start.ok_or(ProjectionError::NoInverseRule("a Start rule"))?,
            end: end.ok_or(ProjectionError::NoInverseRule("an End rule"))?,
            flow: flow.ok_or(ProjectionError::NoInverseRule("a Flow rule"))?,
            performer: performer.ok_or(ProjectionError::NoInverseRule("a PerformerRef rule"))?,
        })
    }
}

pub(super) fn nibm_to_grade(
    model: &NibmProcess,
    def: &MappingDefinition,
    allow_synthetic: bool,
) -> Result<(GradeProcess, MappingTrace), ProjectionError> {
    let report = validate_nibm(model)?;
    if !report.is_empty() {
        return Err(ProjectionError::SourceInvalid(report));
    }
    let inv = InverseRules::build(def)?;
    let idx = model.index()?;
    let pos_of: BTreeMap<&str, usize> = model
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (n.id.as_str(), i))
        .collect();

    let mut out = GradeProcess::new(model.name.clone());
    let mut trace = MappingTrace::new(Direction::FromNibm);

    let mut performer_map: BTreeMap<&str, String> = BTreeMap::new();
    for p in &model.performers {
        let gid = synth_id(&p.id, inv.performer, 0);
        out.performers.push(GradePerformerRef {
            id: gid.clone(),
            kind: p.referent.kind_str().into(),
            name: p.referent.name().into(),
        });
        performer_map.insert(&p.id, gid.clone());
        trace.push(&p.id, inv.performer, vec![gid]);
    }

    // classify control nodes: absorbed into a task, or synthetic
    #[derive(Clone)]
    enum ControlFate {
        AbsorbedBy { task: usize, via: usize },
        Synthetic { grade_id: String },
    }
    let mut fates: BTreeMap<usize, ControlFate> = BTreeMap::new();
    let mut task_trig: BTreeMap<usize, GateAttr> = BTreeMap::new();
    let mut task_branch: BTreeMap<usize, GateAttr> = BTreeMap::new();
    let mut synthetic_tasks: Vec<(usize, GradeTask, &str)> = Vec::new();

    for (i, node) in model.nodes.iter().enumerate() {
        match node.kind {
            NodeKind::Merge | NodeKind::Join => {
                let attr = if node.kind == NodeKind::Merge {
                    GateAttr::Or
                } else {
                    GateAttr::And
                };
                let out_t = idx.outflows[i][0];
                let t = &model.transitions[out_t];
                if t.kind == TransitionKind::Incoming {
                    let task = pos_of[t.target.as_str()];
                    fates.insert(i, ControlFate::AbsorbedBy { task, via: out_t });
                    task_trig.insert(task, attr);
                } else if allow_synthetic {
                    let rule = if node.kind == NodeKind::Merge {
                        "synth-merge"
                    } else {
                        "synth-join"
                    };
                    let gid = synth_id(&node.id, rule, 0);
                    let mut task = GradeTask::new(gid.clone(), format!("noop {}", node.id));
                    task.triggering = attr;
                    synthetic_tasks.push((i, task, rule));
                    fates.insert(i, ControlFate::Synthetic { grade_id: gid });
                } else {
                    return Err(ProjectionError::Unabsorbable {
                        node: node.id.clone(),
                    });
                }
            }
            NodeKind::Decision | NodeKind::Fork => {
                let attr = if node.kind == NodeKind::Decision {
                    GateAttr::Or
                } else {
                    GateAttr::And
                };
                let in_t = idx.inflows[i][0];
                let t = &model.transitions[in_t];
                if t.kind == TransitionKind::Outgoing {
                    let task = pos_of[t.source.as_str()];
                    fates.insert(i, ControlFate::AbsorbedBy { task, via: in_t });
                    task_branch.insert(task, attr);
                } else if allow_synthetic {
                    let rule = if node.kind == NodeKind::Decision {
                        "synth-decision"
                    } else {
                        "synth-fork"
                    };
                    let gid = synth_id(&node.id, rule, 0);
                    let mut task = GradeTask::new(gid.clone(), format!("noop {}", node.id));
                    task.branching = attr;
                    synthetic_tasks.push((i, task, rule));
                    fates.insert(i, ControlFate::Synthetic { grade_id: gid });
                } else {
                    return Err(ProjectionError::Unabsorbable {
                        node: node.id.clone(),
                    });
                }
            }
            _ => {}
        }
    }

    // tasks, starts, ends
    let mut grade_id_of: BTreeMap<usize, String> = BTreeMap::new();
    let mut task_pos_of: BTreeMap<String, usize> = BTreeMap::new();
    for (i, node) in model.nodes.iter().enumerate() {
        match node.kind {
            NodeKind::Task => {
                let trig = task_trig.get(&i).copied().unwrap_or(GateAttr::None);
                let branch = task_branch.get(&i).copied().unwrap_or(GateAttr::None);
                let trig_rule = match trig {
                    GateAttr::Or => inv.trig_rule(NodeKind::Merge)?,
                    GateAttr::And => inv.trig_rule(NodeKind::Join)?,
                    GateAttr::None => inv.trig_bare,
                };
                let gid = synth_id(&node.id, trig_rule, 0);
                let mut task = GradeTask::new(gid.clone(), node.label.clone().unwrap_or_default());
                task.triggering = trig;
                task.branching = branch;
                task.performer = node
                    .performer
                    .as_deref()
                    .and_then(|p| performer_map.get(p).cloned());
                task_pos_of.insert(gid.clone(), out.tasks.len());
                out.tasks.push(task);
                grade_id_of.insert(i, gid.clone());
                trace.push(&node.id, trig_rule, vec![gid]);
            }
            NodeKind::Start => {
                let gid = synth_id(&node.id, inv.start, 0);
                out.starts.push(GradeStart { id: gid.clone() });
                grade_id_of.insert(i, gid.clone());
                trace.push(&node.id, inv.start, vec![gid]);
            }
            NodeKind::Stop => {
                let gid = synth_id(&node.id, inv.end, 0);
                out.ends.push(GradeEnd { id: gid.clone() });
                grade_id_of.insert(i, gid.clone());
                trace.push(&node.id, inv.end, vec![gid]);
            }
            _ => {}
        }
    }
    for (i, task, rule) in synthetic_tasks {
        let gid = task.id.clone();
        task_pos_of.insert(gid.clone(), out.tasks.len());
        let node_id = model.nodes[i].id.clone();
        out.tasks.push(task);
        grade_id_of.insert(i, gid.clone());
        trace.push(node_id, rule, vec![gid]);
    }

    // links for absorbed control structure
    for (i, fate) in &fates {
        if let ControlFate::AbsorbedBy { task, via } = fate {
            let rule = match model.nodes[*i].kind {
                NodeKind::Merge => inv.trig_rule(NodeKind::Merge)?,
                NodeKind::Join => inv.trig_rule(NodeKind::Join)?,
                NodeKind::Decision => inv.branch_rule(NodeKind::Decision)?,
                NodeKind::Fork => inv.branch_rule(NodeKind::Fork)?,
                _ => unreachable!(),
            };
            let gid = grade_id_of[task].clone();
            trace.push(&model.nodes[*i].id, rule, vec![gid.clone()]);
            trace.push(&model.transitions[*via].id, rule, vec![gid]);
        }
    }

    // flows from Pass transitions; absorbed Incoming/Outgoing carry none
    let anchor = |node_pos: usize| -> String {
        match fates.get(&node_pos) {
            Some(ControlFate::AbsorbedBy { task, .. }) => grade_id_of[task].clone(),
            Some(ControlFate::Synthetic { grade_id }) => grade_id.clone(),
            None => grade_id_of[&node_pos].clone(),
        }
    };
    for t in &model.transitions {
        if t.kind != TransitionKind::Pass {
            continue;
        }
        let gid = synth_id(&t.id, inv.flow, 0);
        let source = anchor(pos_of[t.source.as_str()]);
        let target = anchor(pos_of[t.target.as_str()]);
        if let Some(guard) = &t.guard {
            if let Some(&tp) = task_pos_of.get(&source) {
                out.tasks[tp].guards.insert(gid.clone(), guard.clone());
            }
        }
        out.flows.push(GradeFlow {
            id: gid.clone(),
            source,
            target,
        });
        trace.push(&t.id, inv.flow, vec![gid]);
    }

    let report = validate_grade(&out)?;
    if !report.is_empty() {
        return Err(ProjectionError::ResultInvalid { report, trace });
    }
    Ok((out, trace))
}

fn attr_map(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn unsupported(rule: &MappingRule, tpl: &ElementTemplate, class: &str) -> ProjectionError {
    ProjectionError::Template {
        rule: rule.id.clone(),
        detail: format!("template {tpl:?} is not interpretable on class {class}"),
    }
}
