//! The two shipped mapping definitions.

use super::{ElementTemplate, Guard, MappingDefinition, MappingRule};
use crate::interchange::Notation;
use crate::nibm::{NodeKind, TransitionKind};

fn rule(
    id: &str,
    class: &str,
    guard: Guard,
    produces: Vec<ElementTemplate>,
    consumes: &[&str],
) -> MappingRule {
    MappingRule {
        id: id.into(),
        source_class: class.into(),
        guard,
        produces,
        consumes: consumes.iter().map(|s| s.to_string()).collect(),
    }
}

/// GRADE to independent-model correspondence.
///
/// The task is the inclusive concept on the GRADE side: depending on its
/// triggering attribute it corresponds to a Merge or Join plus the task
/// (or just the task), with the Incoming transition included whenever a
/// unifier is; the exit side behaves the same way with Decision/Fork and
/// Outgoing. The triggering trio and the branching trio each form an
/// exclusive group. Flows become Pass transitions, re-anchored at the
/// synthesized control nodes where those exist.
pub fn builtin_grade_mapping() -> MappingDefinition {
    use ElementTemplate as T;
    use NodeKind as N;
    use TransitionKind as K;
    let rules = vec![
        rule(
            "trig-or",
            "Task",
            Guard::eq("triggering", "OR"),
            vec![
                T::node(N::Merge),
                T::transition(K::Incoming),
                T::labeled_node(N::Task),
            ],
            &["triggering", "name", "performer", "inflows"],
        ),
        rule(
            "trig-and",
            "Task",
            Guard::eq("triggering", "AND"),
            vec![
                T::node(N::Join),
                T::transition(K::Incoming),
                T::labeled_node(N::Task),
            ],
            &["triggering", "name", "performer", "inflows"],
        ),
        rule(
            "trig-none",
            "Task",
            Guard::eq("triggering", "NONE"),
            vec![T::labeled_node(N::Task)],
            &["triggering", "name", "performer"],
        ),
        rule(
            "branch-or",
            "Task",
            Guard::eq("branching", "OR"),
            vec![
                T::labeled_node(N::Task),
                T::transition(K::Outgoing),
                T::node(N::Decision),
            ],
            &["branching", "guards", "outflows"],
        ),
        rule(
            "branch-and",
            "Task",
            Guard::eq("branching", "AND"),
            vec![
                T::labeled_node(N::Task),
                T::transition(K::Outgoing),
                T::node(N::Fork),
            ],
            &["branching", "outflows"],
        ),
        rule(
            "branch-none",
            "Task",
            Guard::eq("branching", "NONE"),
            vec![T::labeled_node(N::Task)],
            &["branching"],
        ),
        rule("start", "Start", Guard::True, vec![T::node(N::Start)], &[]),
        rule("end", "End", Guard::True, vec![T::node(N::Stop)], &[]),
        rule(
            "flow",
            "Flow",
            Guard::True,
            vec![T::transition(K::Pass)],
            &["source", "target"],
        ),
        rule(
            "performer",
            "PerformerRef",
            Guard::True,
            vec![T::Performer],
            &["kind", "name"],
        ),
    ];
    MappingDefinition {
        source_notation: Notation::GradeBm,
        rules,
        xor_groups: vec![
            vec!["trig-or".into(), "trig-and".into(), "trig-none".into()],
            vec![
                "branch-or".into(),
                "branch-and".into(),
                "branch-none".into(),
            ],
        ],
    }
}

/// UML-AD to independent-model correspondence: strictly one to one.
///
/// Incoming/Outgoing have no counterpart in this notation; projecting
/// out of the independent model collapses them into plain control flows,
/// and projecting in re-derives them from endpoint kinds.
pub fn builtin_umlad_mapping() -> MappingDefinition {
    use ElementTemplate as T;
    use NodeKind as N;
    use TransitionKind as K;
    let rules = vec![
        rule(
            "action",
            "Action",
            Guard::True,
            vec![T::labeled_node(N::Task)],
            &["name", "partition"],
        ),
        rule(
            "decision",
            "DecisionNode",
            Guard::True,
            vec![T::node(N::Decision)],
            &[],
        ),
        rule(
            "merge",
            "MergeNode",
            Guard::True,
            vec![T::node(N::Merge)],
            &[],
        ),
        rule("fork", "ForkNode", Guard::True, vec![T::node(N::Fork)], &[]),
        rule("join", "JoinNode", Guard::True, vec![T::node(N::Join)], &[]),
        rule(
            "initial",
            "InitialNode",
            Guard::True,
            vec![T::node(N::Start)],
            &[],
        ),
        rule(
            "final",
            "ActivityFinalNode",
            Guard::True,
            vec![T::node(N::Stop)],
            &[],
        ),
        rule(
            "flow",
            "ControlFlow",
            Guard::True,
            vec![T::transition(K::Pass)],
            &["guard", "source", "target"],
        ),
        rule(
            "partition",
            "Partition",
            Guard::True,
            vec![T::Performer],
            &["kind", "name"],
        ),
    ];
    MappingDefinition {
        source_notation: Notation::UmlAd,
        rules,
        xor_groups: Vec::new(),
    }
}
