//! UML-AD projections in both directions.
//!
//! Nearly one-one in both directions. The only non-trivial move is the
//! transition-kind collapse: this notation has no Incoming/Outgoing
//! subclasses, so projecting out flattens every transition to a control
//! flow, and projecting in recovers the kinds from endpoint node kinds
//! (unifier-to-action edges become Incoming, action-to-brancher edges
//! become Outgoing).

use super::project::{fire_rules, synth_id, ProjectionError};
use super::{Direction, ElementTemplate, MappingDefinition, MappingRule, MappingTrace};
use crate::nibm::{
    validate_nibm, NibmNode, NibmProcess, NibmTransition, NodeKind, Performer, PerformerReferent,
    TransitionKind,
};
use crate::umlad::{
    validate_umlad, UmlActivity, UmlControlFlow, UmlNode, UmlNodeKind, UmlPartition,
};
use std::collections::BTreeMap;

pub(super) fn uml_to_nibm(
    model: &UmlActivity,
    def: &MappingDefinition,
) -> Result<(NibmProcess, MappingTrace), ProjectionError> {
    let report = validate_umlad(model)?;
    if !report.is_empty() {
        return Err(ProjectionError::SourceInvalid(report));
    }

    let mut out = NibmProcess::new(model.name.clone());
    let mut trace = MappingTrace::new(Direction::ToNibm);

    let mut partition_map: BTreeMap<&str, String> = BTreeMap::new();
    for p in &model.partitions {
        let attrs = attr_map(&[("kind", &p.kind), ("name", &p.name)]);
        for rule in fire_rules(def, "Partition", &attrs, &p.id)? {
            let mut produced = Vec::new();
            for (i, tpl) in rule.produces.iter().enumerate() {
                match tpl {
                    ElementTemplate::Performer => {
                        let id = synth_id(&p.id, &rule.id, i);
                        let referent = PerformerReferent::from_parts(&p.kind, p.name.clone())
                            .ok_or_else(|| ProjectionError::Template {
                                rule: rule.id.clone(),
                                detail: format!("unknown partition kind {:?}", p.kind),
                            })?;
                        out.performers.push(Performer {
                            id: id.clone(),
                            referent,
                        });
                        partition_map.insert(&p.id, id.clone());
                        produced.push(id);
                    }
                    other => return Err(unsupported(rule, other)),
                }
            }
            if !produced.is_empty() {
                trace.push(&p.id, &rule.id, produced);
            }
        }
    }

    let mut node_map: BTreeMap<&str, String> = BTreeMap::new();
    let mut kind_of: BTreeMap<&str, UmlNodeKind> = BTreeMap::new();
    for node in &model.nodes {
        kind_of.insert(&node.id, node.kind);
        let mut attrs = BTreeMap::new();
        if let Some(name) = &node.name {
            attrs.insert("name".to_string(), name.clone());
        }
        if let Some(p) = &node.partition {
            attrs.insert("partition".to_string(), p.clone());
        }
        for rule in fire_rules(def, node.kind.as_str(), &attrs, &node.id)? {
            let mut produced = Vec::new();
            for (i, tpl) in rule.produces.iter().enumerate() {
                match tpl {
                    ElementTemplate::Node {
                        kind,
                        copy_label,
                        copy_performer,
                    } => {
                        let id = synth_id(&node.id, &rule.id, i);
                        let mut n = NibmNode::new(id.clone(), *kind);
                        if *copy_label {
                            n.label = node.name.clone();
                        }
                        if *copy_performer {
                            n.performer = node
                                .partition
                                .as_deref()
                                .and_then(|p| partition_map.get(p).cloned());
                        }
                        out.nodes.push(n);
                        node_map.insert(&node.id, id.clone());
                        produced.push(id);
                    }
                    other => return Err(unsupported(rule, other)),
                }
            }
            if !produced.is_empty() {
                trace.push(&node.id, &rule.id, produced);
            }
        }
    }

    for edge in &model.edges {
        let mut attrs = BTreeMap::new();
        if let Some(g) = &edge.guard {
            attrs.insert("guard".to_string(), g.clone());
        }
        for rule in fire_rules(def, "ControlFlow", &attrs, &edge.id)? {
            let mut produced = Vec::new();
            for (i, tpl) in rule.produces.iter().enumerate() {
                match tpl {
                    ElementTemplate::Transition { kind } => {
                        let id = synth_id(&edge.id, &rule.id, i);
                        // recover the subclass the notation cannot spell
                        let src_kind = kind_of[edge.source.as_str()];
                        let tgt_kind = kind_of[edge.target.as_str()];
                        let kind = match (src_kind, tgt_kind) {
                            (
                                UmlNodeKind::MergeNode | UmlNodeKind::JoinNode,
                                UmlNodeKind::Action,
                            ) => TransitionKind::Incoming,
                            (
                                UmlNodeKind::Action,
                                UmlNodeKind::DecisionNode | UmlNodeKind::ForkNode,
                            ) => TransitionKind::Outgoing,
                            _ => *kind,
                        };
                        let mut t = NibmTransition::new(
                            id.clone(),
                            kind,
                            node_map[edge.source.as_str()].clone(),
                            node_map[edge.target.as_str()].clone(),
                        );
                        t.guard = edge.guard.clone();
                        out.transitions.push(t);
                        produced.push(id);
                    }
                    other => return Err(unsupported(rule, other)),
                }
            }
            if !produced.is_empty() {
                trace.push(&edge.id, &rule.id, produced);
            }
        }
    }

    let report = validate_nibm(&out)?;
    if !report.is_empty() {
        return Err(ProjectionError::ResultInvalid { report, trace });
    }
    Ok((out, trace))
}

pub(super) fn nibm_to_uml(
    model: &NibmProcess,
    def: &MappingDefinition,
) -> Result<(UmlActivity, MappingTrace), ProjectionError> {
    let report = validate_nibm(model)?;
    if !report.is_empty() {
        return Err(ProjectionError::SourceInvalid(report));
    }

    // one rule per produced node kind makes the definition invertible
    let mut node_rule: BTreeMap<NodeKind, (&str, UmlNodeKind)> = BTreeMap::new();
    let mut flow_rule = None;
    let mut partition_rule = None;
    for rule in &def.rules {
        if rule.produces.len() != 1 {
            continue;
        }
        match (&rule.produces[0], rule.source_class.as_str()) {
            (ElementTemplate::Node { kind, .. }, class) => {
                if let Some(uml_kind) = UmlNodeKind::parse(class) {
                    node_rule
                        .entry(*kind)
                        .or_insert((rule.id.as_str(), uml_kind));
                }
            }
            (ElementTemplate::Transition { .. }, "ControlFlow") => {
                flow_rule = flow_rule.or(Some(rule.id.as_str()));
            }
            (ElementTemplate::Performer, "Partition") => {
                partition_rule = partition_rule.or(Some(rule.id.as_str()));
            }
            _ => {}
        }
    }
    let flow_rule = flow_rule.ok_or(ProjectionError::NoInverseRule("a ControlFlow rule"))?;
    let partition_rule =
        partition_rule.ok_or(ProjectionError::NoInverseRule("a Partition rule"))?;

    let mut out = UmlActivity::new(model.name.clone());
    let mut trace = MappingTrace::new(Direction::FromNibm);

    let mut performer_map: BTreeMap<&str, String> = BTreeMap::new();
    for p in &model.performers {
        let uid = synth_id(&p.id, partition_rule, 0);
        out.partitions.push(UmlPartition {
            id: uid.clone(),
            name: p.referent.name().into(),
            kind: p.referent.kind_str().into(),
        });
        performer_map.insert(&p.id, uid.clone());
        trace.push(&p.id, partition_rule, vec![uid]);
    }

    let mut node_map: BTreeMap<&str, String> = BTreeMap::new();
    for node in &model.nodes {
        let (rule_id, uml_kind) = *node_rule
            .get(&node.kind)
            .ok_or(ProjectionError::NoInverseRule("a rule for this node kind"))?;
        let uid = synth_id(&node.id, rule_id, 0);
        let mut n = UmlNode::new(uid.clone(), uml_kind);
        if uml_kind == UmlNodeKind::Action {
            n.name = node.label.clone();
            n.partition = node
                .performer
                .as_deref()
                .and_then(|p| performer_map.get(p).cloned());
        }
        out.nodes.push(n);
        node_map.insert(&node.id, uid.clone());
        trace.push(&node.id, rule_id, vec![uid]);
    }

    for t in &model.transitions {
        let uid = synth_id(&t.id, flow_rule, 0);
        out.edges.push(UmlControlFlow {
            id: uid.clone(),
            source: node_map[t.source.as_str()].clone(),
            target: node_map[t.target.as_str()].clone(),
            guard: t.guard.clone(),
        });
        trace.push(&t.id, flow_rule, vec![uid]);
    }

    let report = validate_umlad(&out)?;
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

fn unsupported(rule: &MappingRule, tpl: &ElementTemplate) -> ProjectionError {
    ProjectionError::Template {
        rule: rule.id.clone(),
        detail: format!("template {tpl:?} is not interpretable for this class"),
    }
}
