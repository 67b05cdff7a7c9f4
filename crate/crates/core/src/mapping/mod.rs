//! Declarative class correspondences between a concrete notation and the
//! independent metamodel.
//!
//! A [`MappingDefinition`] is data: an ordered list of rules, each tying
//! a source metamodel class and a guard over its attributes to a list of
//! element templates to instantiate, plus groups of rule ids of which at
//! most one may fire per source instance. Projections interpret the
//! definition, synthesize elements, rewire flows around them and record
//! every source-to-produced link in a [`MappingTrace`].
//!
//! The forward direction (notation to independent model) is fully driven
//! by the definition. The inverse direction inverts the rule set by
//! recognizing it structurally, so it requires the rules to follow the
//! builtin shapes (one bare node rule per class, trigger rules producing
//! a unifier, branch rules producing a brancher).
//!
//! The enterprise context of an independent model has no counterpart in
//! either notation and does not survive projection out of it.

mod builtin;
mod grade_dir;
mod guard;
mod project;
mod uml_dir;

pub use builtin::{builtin_grade_mapping, builtin_umlad_mapping};
pub use guard::{Guard, GuardParseError};
pub use project::{
    derive, document_to_nibm, project_from_nibm, project_to_nibm, remap_trace, NotationModel,
    NotationModelRef, ProjectionError,
};

use crate::interchange::Notation;
use crate::nibm::{NodeKind, TransitionKind};
use crate::report::ValidationReport;
use serde::de::Error as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One element to instantiate when a rule fires. Endpoint wiring is the
/// projection engine's job; templates only say what to create and which
/// source attributes to copy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ElementTemplate {
    Node {
        kind: NodeKind,
        /// Copy the source's name attribute into the node label.
        copy_label: bool,
        /// Carry the source's performer reference over.
        copy_performer: bool,
    },
    Transition {
        kind: TransitionKind,
    },
    Performer,
}

impl ElementTemplate {
    pub fn node(kind: NodeKind) -> Self {
        ElementTemplate::Node {
            kind,
            copy_label: false,
            copy_performer: false,
        }
    }

    pub fn labeled_node(kind: NodeKind) -> Self {
        ElementTemplate::Node {
            kind,
            copy_label: true,
            copy_performer: true,
        }
    }

    pub fn transition(kind: TransitionKind) -> Self {
        ElementTemplate::Transition { kind }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingRule {
    pub id: String,
    /// Class name in the source notation's metamodel, e.g. `Task`.
    pub source_class: String,
    pub guard: Guard,
    pub produces: Vec<ElementTemplate>,
    /// Source attributes and edges this rule accounts for; documentation
    /// for readers of the definition, not engine input.
    pub consumes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingDefinition {
    pub source_notation: Notation,
    pub rules: Vec<MappingRule>,
    /// Groups of rule ids; within a group at most one rule may fire per
    /// source instance.
    pub xor_groups: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum DefinitionError {
    #[error("duplicate rule id {0}")]
    DuplicateRule(String),
    #[error("rule {rule}: unknown class {class} for notation {notation}")]
    UnknownClass {
        rule: String,
        class: String,
        notation: &'static str,
    },
    #[error("rule {rule}: guard inspects unknown attribute {attr} of class {class}")]
    UnknownAttribute {
        rule: String,
        class: String,
        attr: String,
    },
    #[error("rule {rule}: class {class} has no name/performer attributes to copy")]
    UncopyableAttributes { rule: String, class: String },
    #[error("xor group references unknown rule id {0}")]
    UnknownXorMember(String),
    #[error("mapping definitions describe a concrete notation, not the independent model")]
    IndependentSource,
}

/// Attribute vocabulary per (notation, class); the definition checker
/// validates guards and copies against it.
fn class_attributes(notation: Notation, class: &str) -> Option<&'static [&'static str]> {
    match notation {
        Notation::GradeBm => Some(match class {
            "Task" => &["name", "triggering", "branching", "performer"],
            "Start" | "End" | "Flow" => &[],
            "PerformerRef" => &["kind", "name"],
            _ => return None,
        }),
        Notation::UmlAd => Some(match class {
            "Action" => &["name", "partition"],
            "DecisionNode" | "MergeNode" | "ForkNode" | "JoinNode" | "InitialNode"
            | "ActivityFinalNode" => &[],
            "ControlFlow" => &["guard"],
            "Partition" => &["kind", "name"],
            _ => return None,
        }),
        Notation::Nibm => None,
    }
}

impl MappingDefinition {
    /// Structural sanity of the definition itself: known classes, guards
    /// over existing attributes, xor members that exist.
    pub fn check(&self) -> Result<(), DefinitionError> {
        if self.source_notation == Notation::Nibm {
            return Err(DefinitionError::IndependentSource);
        }
        let mut seen = std::collections::BTreeSet::new();
        for rule in &self.rules {
            if !seen.insert(&rule.id) {
                return Err(DefinitionError::DuplicateRule(rule.id.clone()));
            }
            let attrs =
                class_attributes(self.source_notation, &rule.source_class).ok_or_else(|| {
                    DefinitionError::UnknownClass {
                        rule: rule.id.clone(),
                        class: rule.source_class.clone(),
                        notation: self.source_notation.tag(),
                    }
                })?;
            for attr in rule.guard.attributes() {
                if !attrs.contains(&attr) {
                    return Err(DefinitionError::UnknownAttribute {
                        rule: rule.id.clone(),
                        class: rule.source_class.clone(),
                        attr: attr.to_string(),
                    });
                }
            }
            for tpl in &rule.produces {
                if let ElementTemplate::Node {
                    copy_label,
                    copy_performer,
                    ..
                } = tpl
                {
                    if (*copy_label || *copy_performer) && !attrs.contains(&"name") {
                        return Err(DefinitionError::UncopyableAttributes {
                            rule: rule.id.clone(),
                            class: rule.source_class.clone(),
                        });
                    }
                }
            }
        }
        for group in &self.xor_groups {
            for member in group {
                if !self.rules.iter().any(|r| &r.id == member) {
                    return Err(DefinitionError::UnknownXorMember(member.clone()));
                }
            }
        }
        Ok(())
    }

    pub fn rule(&self, id: &str) -> Option<&MappingRule> {
        self.rules.iter().find(|r| r.id == id)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("definition serialization");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Who produced a trace: a projection into the independent model, out of
/// it, or the composition of both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "toNibm")]
    ToNibm,
    #[serde(rename = "fromNibm")]
    FromNibm,
    #[serde(rename = "derived")]
    Derived,
}

/// One instance-level correspondence: the source element, the rule that
/// fired for it, and every element the rule's templates stand for
/// (shared elements included).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceLink {
    #[serde(rename = "src")]
    pub source: String,
    pub rule: String,
    #[serde(rename = "out")]
    pub produced: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingTrace {
    pub direction: Direction,
    pub links: Vec<TraceLink>,
}

impl MappingTrace {
    pub fn new(direction: Direction) -> Self {
        MappingTrace {
            direction,
            links: Vec::new(),
        }
    }

    pub fn push(
        &mut self,
        source: impl Into<String>,
        rule: impl Into<String>,
        produced: Vec<String>,
    ) {
        self.links.push(TraceLink {
            source: source.into(),
            rule: rule.into(),
            produced,
        });
    }

    /// All produced ids for one source element, across its links.
    pub fn produced_for(&self, source: &str) -> Vec<&str> {
        let mut out = Vec::new();
        for link in self.links.iter().filter(|l| l.source == source) {
            for id in &link.produced {
                if !out.contains(&id.as_str()) {
                    out.push(id.as_str());
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("trace serialization");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Anything that can enumerate the element ids a trace must cover.
pub trait ModelElements {
    fn element_ids(&self) -> Vec<String>;
}

impl ModelElements for crate::grade::GradeProcess {
    fn element_ids(&self) -> Vec<String> {
        crate::grade::GradeProcess::element_ids(self)
    }
}

impl ModelElements for crate::umlad::UmlActivity {
    fn element_ids(&self) -> Vec<String> {
        crate::umlad::UmlActivity::element_ids(self)
    }
}

impl ModelElements for crate::nibm::NibmProcess {
    fn element_ids(&self) -> Vec<String> {
        crate::nibm::NibmProcess::element_ids(self)
    }
}

/// Empty report iff every source element appears in at least one link.
pub fn check_totality<M: ModelElements>(trace: &MappingTrace, source: &M) -> ValidationReport {
    let mut report = ValidationReport::new();
    let covered: std::collections::BTreeSet<&str> =
        trace.links.iter().map(|l| l.source.as_str()).collect();
    for id in source.element_ids() {
        if !covered.contains(id.as_str()) {
            report.push(
                &id,
                "mapping.totality",
                "source element is not covered by any mapping link",
            );
        }
    }
    report
}

// --- serde for definitions -------------------------------------------------
//
// {"source":"grade-bm","rules":[{"id":…,"class":…,"guard":"triggering=OR",
//  "produces":[…],"consumes":[…]}],"xor":[["trig-or","trig-and","trig-none"]]}

#[derive(Serialize, Deserialize)]
struct DefinitionDto {
    source: String,
    rules: Vec<RuleDto>,
    #[serde(default, rename = "xor")]
    xor_groups: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct RuleDto {
    id: String,
    class: String,
    guard: String,
    produces: Vec<TemplateDto>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    consumes: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "element", rename_all = "lowercase")]
enum TemplateDto {
    Node {
        kind: String,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        copy_label: bool,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        copy_performer: bool,
    },
    Transition {
        kind: String,
    },
    Performer,
}

impl Serialize for MappingDefinition {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let dto = DefinitionDto {
            source: self.source_notation.tag().to_string(),
            rules: self
                .rules
                .iter()
                .map(|r| RuleDto {
                    id: r.id.clone(),
                    class: r.source_class.clone(),
                    guard: r.guard.to_string(),
                    produces: r
                        .produces
                        .iter()
                        .map(|t| match t {
                            ElementTemplate::Node {
                                kind,
                                copy_label,
                                copy_performer,
                            } => TemplateDto::Node {
                                kind: kind.as_str().to_string(),
                                copy_label: *copy_label,
                                copy_performer: *copy_performer,
                            },
                            ElementTemplate::Transition { kind } => TemplateDto::Transition {
                                kind: kind.as_str().to_string(),
                            },
                            ElementTemplate::Performer => TemplateDto::Performer,
                        })
                        .collect(),
                    consumes: r.consumes.clone(),
                })
                .collect(),
            xor_groups: self.xor_groups.clone(),
        };
        dto.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MappingDefinition {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let dto = DefinitionDto::deserialize(deserializer)?;
        let source_notation = Notation::parse(&dto.source)
            .ok_or_else(|| D::Error::custom(format!("unknown notation {:?}", dto.source)))?;
        let mut rules = Vec::with_capacity(dto.rules.len());
        for r in dto.rules {
            let guard = Guard::parse(&r.guard).map_err(D::Error::custom)?;
            let mut produces = Vec::with_capacity(r.produces.len());
            for t in r.produces {
                produces.push(match t {
                    TemplateDto::Node {
                        kind,
                        copy_label,
                        copy_performer,
                    } => ElementTemplate::Node {
                        kind: NodeKind::parse(&kind).ok_or_else(|| {
                            D::Error::custom(format!("unknown node kind {kind:?}"))
                        })?,
                        copy_label,
                        copy_performer,
                    },
                    TemplateDto::Transition { kind } => ElementTemplate::Transition {
                        kind: TransitionKind::parse(&kind).ok_or_else(|| {
                            D::Error::custom(format!("unknown transition kind {kind:?}"))
                        })?,
                    },
                    TemplateDto::Performer => ElementTemplate::Performer,
                });
            }
            rules.push(MappingRule {
                id: r.id,
                source_class: r.class,
                guard,
                produces,
                consumes: r.consumes,
            });
        }
        Ok(MappingDefinition {
            source_notation,
            rules,
            xor_groups: dto.xor_groups,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn definition_json_round_trip() {
        let def = builtin_grade_mapping();
        let text = def.to_json();
        assert!(text.contains("\"source\": \"grade-bm\""));
        assert!(text.contains("triggering=OR"));
        let back = MappingDefinition::from_json(&text).unwrap();
        assert_eq!(def, back);
    }

    #[test]
    fn check_flags_unknown_class() {
        let mut def = builtin_grade_mapping();
        def.rules[0].source_class = "Gateway".into();
        assert!(matches!(
            def.check(),
            Err(DefinitionError::UnknownClass { .. })
        ));
    }

    #[test]
    fn check_flags_unknown_guard_attribute() {
        let mut def = builtin_grade_mapping();
        def.rules[0].guard = Guard::eq("color", "red");
        assert!(matches!(
            def.check(),
            Err(DefinitionError::UnknownAttribute { .. })
        ));
    }

    #[test]
    fn check_flags_unknown_xor_member() {
        let mut def = builtin_grade_mapping();
        def.xor_groups.push(vec!["no-such-rule".into()]);
        assert!(matches!(
            def.check(),
            Err(DefinitionError::UnknownXorMember(_))
        ));
    }

    #[test]
    fn trace_json_shape() {
        let mut trace = MappingTrace::new(Direction::ToNibm);
        trace.push("t1", "trig-or", vec!["a".into(), "b".into()]);
        let text = trace.to_json();
        assert!(text.contains("\"direction\": \"toNibm\""));
        assert!(text.contains("\"src\": \"t1\""));
        assert!(text.contains("\"out\""));
        assert_eq!(MappingTrace::from_json(&text).unwrap(), trace);
    }

    #[test]
    fn totality_flags_deleted_link() {
        use crate::grade::testutil::minimal;
        let model = minimal();
        let mut trace = MappingTrace::new(Direction::ToNibm);
        for id in model.element_ids() {
            trace.push(id, "r", vec!["x".into()]);
        }
        assert!(check_totality(&trace, &model).is_empty());
        trace.links.remove(2);
        let report = check_totality(&trace, &model);
        assert_eq!(report.len(), 1);
        assert_eq!(report.violations[0].rule, "mapping.totality");
    }

    #[test]
    fn totality_of_empty_model_is_empty() {
        let model = crate::grade::GradeProcess::new("empty");
        let trace = MappingTrace::new(Direction::ToNibm);
        assert!(check_totality(&trace, &model).is_empty());
    }
}
