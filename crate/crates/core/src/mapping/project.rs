//! Projection entry points and the machinery shared by both notations:
//! rule firing with XOR enforcement, deterministic id synthesis, trace
//! remapping and composition.

use super::grade_dir;
use super::uml_dir;
use super::{DefinitionError, Direction, MappingDefinition, MappingRule, MappingTrace, TraceLink};
use crate::grade::GradeProcess;
use crate::interchange::{Document, Notation};
use crate::nibm::{normalize_with_map, validate_nibm, IdRemap, NibmProcess};
use crate::report::{StructuralError, ValidationReport};
use crate::umlad::UmlActivity;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProjectionError {
    #[error("invalid mapping definition: {0}")]
    Definition(#[from] DefinitionError),
    #[error("definition is for notation {expected}, model is {found}")]
    NotationMismatch {
        expected: &'static str,
        found: &'static str,
    },
    #[error("source model is not well formed:\n{0}")]
    SourceInvalid(ValidationReport),
    #[error("source model is structurally broken: {0}")]
    Structural(#[from] StructuralError),
    #[error("no mapping rule matches {class} element {element}")]
    NoRuleMatches { element: String, class: String },
    #[error("xor violation on element {element}: rules {rules:?} all fired within one group")]
    XorViolation { element: String, rules: Vec<String> },
    #[error("rule {rule} not interpretable here: {detail}")]
    Template { rule: String, detail: String },
    #[error("definition lacks a rule producing {0}; inverse projection is not derivable")]
    NoInverseRule(&'static str),
    #[error("unabsorbable control chain at node {node}; pass allow_synthetic to expand it")]
    Unabsorbable { node: String },
    #[error("projected model fails validation:\n{report}")]
    ResultInvalid {
        report: ValidationReport,
        trace: MappingTrace,
    },
}

/// An owned model of either concrete notation.
#[derive(Debug, Clone)]
pub enum NotationModel {
    Grade(GradeProcess),
    Uml(UmlActivity),
}

impl NotationModel {
    pub fn notation(&self) -> Notation {
        match self {
            NotationModel::Grade(_) => Notation::GradeBm,
            NotationModel::Uml(_) => Notation::UmlAd,
        }
    }

    pub fn as_ref(&self) -> NotationModelRef<'_> {
        match self {
            NotationModel::Grade(m) => NotationModelRef::Grade(m),
            NotationModel::Uml(m) => NotationModelRef::Uml(m),
        }
    }

    pub fn into_document(self) -> Document {
        match self {
            NotationModel::Grade(m) => Document::Grade(m),
            NotationModel::Uml(m) => Document::Uml(m),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum NotationModelRef<'a> {
    Grade(&'a GradeProcess),
    Uml(&'a UmlActivity),
}

impl<'a> NotationModelRef<'a> {
    pub fn notation(&self) -> Notation {
        match self {
            NotationModelRef::Grade(_) => Notation::GradeBm,
            NotationModelRef::Uml(_) => Notation::UmlAd,
        }
    }
}

/// Project a concrete-notation model onto the independent metamodel,
/// returning the synthesized process and the instance-level trace.
pub fn project_to_nibm(
    model: NotationModelRef<'_>,
    def: &MappingDefinition,
) -> Result<(NibmProcess, MappingTrace), ProjectionError> {
    def.check()?;
    match (model, def.source_notation) {
        (NotationModelRef::Grade(m), Notation::GradeBm) => grade_dir::grade_to_nibm(m, def),
        (NotationModelRef::Uml(m), Notation::UmlAd) => uml_dir::uml_to_nibm(m, def),
        (m, _) => Err(ProjectionError::NotationMismatch {
            expected: def.source_notation.tag(),
            found: m.notation().tag(),
        }),
    }
}

/// Invert a definition: project an independent-model process into the
/// definition's notation. `allow_synthetic` lets the GRADE direction
/// expand control chains it cannot absorb into task attributes by
/// inserting no-op tasks; without it such chains are an error.
pub fn project_from_nibm(
    model: &NibmProcess,
    def: &MappingDefinition,
    allow_synthetic: bool,
) -> Result<(NotationModel, MappingTrace), ProjectionError> {
    def.check()?;
    match def.source_notation {
        Notation::GradeBm => grade_dir::nibm_to_grade(model, def, allow_synthetic)
            .map(|(m, t)| (NotationModel::Grade(m), t)),
        Notation::UmlAd => {
            uml_dir::nibm_to_uml(model, def).map(|(m, t)| (NotationModel::Uml(m), t))
        }
        Notation::Nibm => Err(DefinitionError::IndependentSource.into()),
    }
}

/// The derived notation-to-notation mapping: compose the primary
/// projections through a normalized independent model. The returned
/// trace pairs source elements of notation A with produced elements of
/// notation B through the independent elements they share.
pub fn derive(
    model: NotationModelRef<'_>,
    def_a: &MappingDefinition,
    def_b: &MappingDefinition,
    allow_synthetic: bool,
) -> Result<(NotationModel, MappingTrace), ProjectionError> {
    let (nibm, trace_a) = project_to_nibm(model, def_a)?;
    let (normalized, remap) = normalize_with_map(&nibm)?;
    let trace_a = remap_trace(trace_a, &remap);
    let (out, trace_b) = project_from_nibm(&normalized, def_b, allow_synthetic)?;
    Ok((out, compose(&trace_a, &trace_b)))
}

/// Project any document to the independent model using the builtin
/// definitions; independent-model documents are validated and passed
/// through.
pub fn document_to_nibm(doc: &Document) -> Result<NibmProcess, ProjectionError> {
    match doc {
        Document::Nibm(m) => {
            let report = validate_nibm(m)?;
            if !report.is_empty() {
                return Err(ProjectionError::SourceInvalid(report));
            }
            Ok(m.clone())
        }
        Document::Grade(m) => {
            project_to_nibm(NotationModelRef::Grade(m), &super::builtin_grade_mapping())
                .map(|(n, _)| n)
        }
        Document::Uml(m) => {
            project_to_nibm(NotationModelRef::Uml(m), &super::builtin_umlad_mapping())
                .map(|(n, _)| n)
        }
    }
}

/// Deterministic id for a synthesized element.
pub(super) fn synth_id(source: &str, rule: &str, index: usize) -> String {
    format!("{source}.{rule}.{index}")
}

/// All rules matching a source instance, in definition order, with the
/// definition's exclusivity groups enforced.
pub(super) fn fire_rules<'d>(
    def: &'d MappingDefinition,
    class: &str,
    attrs: &BTreeMap<String, String>,
    element: &str,
) -> Result<Vec<&'d MappingRule>, ProjectionError> {
    let fired: Vec<&MappingRule> = def
        .rules
        .iter()
        .filter(|r| r.source_class == class && r.guard.eval(attrs))
        .collect();
    if fired.is_empty() {
        return Err(ProjectionError::NoRuleMatches {
            element: element.to_string(),
            class: class.to_string(),
        });
    }
    for group in &def.xor_groups {
        let hits: Vec<String> = fired
            .iter()
            .filter(|r| group.contains(&r.id))
            .map(|r| r.id.clone())
            .collect();
        if hits.len() > 1 {
            return Err(ProjectionError::XorViolation {
                element: element.to_string(),
                rules: hits,
            });
        }
    }
    Ok(fired)
}

/// Rewrite a trace's produced ids through a normalization remap.
pub fn remap_trace(mut trace: MappingTrace, remap: &IdRemap) -> MappingTrace {
    for link in &mut trace.links {
        for id in &mut link.produced {
            if let Some(new) = remap.any(id) {
                *id = new.clone();
            }
        }
    }
    trace
}

fn compose(a: &MappingTrace, b: &MappingTrace) -> MappingTrace {
    let mut by_source: BTreeMap<&str, Vec<&TraceLink>> = BTreeMap::new();
    for link in &b.links {
        by_source
            .entry(link.source.as_str())
            .or_default()
            .push(link);
    }
    let mut out = MappingTrace::new(Direction::Derived);
    for la in &a.links {
        for nibm_id in &la.produced {
            for lb in by_source.get(nibm_id.as_str()).into_iter().flatten() {
                out.push(
                    la.source.clone(),
                    format!("{}+{}", la.rule, lb.rule),
                    lb.produced.clone(),
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::Guard;

    #[test]
    fn xor_violation_is_reported_for_overlapping_rules() {
        let mut def = super::super::builtin_grade_mapping();
        // make trig-and fire alongside trig-or
        if let Some(r) = def.rules.iter_mut().find(|r| r.id == "trig-and") {
            r.guard = Guard::eq("triggering", "OR");
        }
        let attrs: BTreeMap<String, String> =
            [("triggering", "OR"), ("branching", "NONE"), ("name", "A")]
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect();
        let err = fire_rules(&def, "Task", &attrs, "t1").unwrap_err();
        match err {
            ProjectionError::XorViolation { rules, .. } => {
                assert_eq!(rules, vec!["trig-or".to_string(), "trig-and".to_string()]);
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn unmatched_class_is_reported() {
        let def = super::super::builtin_grade_mapping();
        let err = fire_rules(&def, "Timer", &BTreeMap::new(), "x").unwrap_err();
        assert!(matches!(err, ProjectionError::NoRuleMatches { .. }));
    }
}
