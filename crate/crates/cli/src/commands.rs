//! Command implementations, separated from argument parsing so they can
//! be driven directly by tests.
//!
//! Exit code contract: 0 success, 1 validation or equivalence failure,
//! 2 usage or I/O error, 3 inconclusive (a bound tripped before the
//! oracle could decide).

use bmx_core::mapping::{
    builtin_grade_mapping, builtin_umlad_mapping, check_totality, derive, project_from_nibm,
    project_to_nibm, remap_trace, Direction, MappingDefinition, MappingTrace, NotationModelRef,
    ProjectionError,
};
use bmx_core::nibm::normalize_with_map;
use bmx_core::token::OracleError;
use bmx_core::{
    equivalent, isomorphic, read_document, read_grade, read_nibm, read_umlad, validate_grade,
    validate_nibm, validate_umlad, write_document, Bounds, Document, Equivalence, Notation,
    ValidationReport,
};
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

/// What a command run produced: the process exit code, the machine
/// report it wrote (if any) and the human-readable lines for stdout.
#[derive(Debug)]
pub struct CommandOutcome {
    pub exit_code: i32,
    pub report_path: Option<PathBuf>,
    pub messages: Vec<String>,
}

impl CommandOutcome {
    fn ok(messages: Vec<String>) -> Self {
        CommandOutcome {
            exit_code: EXIT_OK,
            report_path: None,
            messages,
        }
    }

    fn fail(code: i32, message: impl Into<String>) -> Self {
        CommandOutcome {
            exit_code: code,
            report_path: None,
            messages: vec![message.into()],
        }
    }
}

fn read_file(path: &Path) -> Result<String, CommandOutcome> {
    std::fs::read_to_string(path).map_err(|e| {
        CommandOutcome::fail(EXIT_USAGE, format!("cannot read {}: {e}", path.display()))
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), CommandOutcome> {
    std::fs::write(path, text).map_err(|e| {
        CommandOutcome::fail(EXIT_USAGE, format!("cannot write {}: {e}", path.display()))
    })
}

fn parse_document(text: &str, notation: Option<Notation>) -> Result<Document, CommandOutcome> {
    let result = match notation {
        None => read_document(text),
        Some(Notation::GradeBm) => read_grade(text).map(Document::Grade),
        Some(Notation::UmlAd) => read_umlad(text).map(Document::Uml),
        Some(Notation::Nibm) => read_nibm(text).map(Document::Nibm),
    };
    result.map_err(|e| CommandOutcome::fail(EXIT_USAGE, format!("parse error: {e}")))
}

fn validate_document(doc: &Document) -> Result<ValidationReport, CommandOutcome> {
    let report = match doc {
        Document::Grade(m) => validate_grade(m),
        Document::Uml(m) => validate_umlad(m),
        Document::Nibm(m) => validate_nibm(m),
    };
    report.map_err(|e| CommandOutcome::fail(EXIT_USAGE, format!("structural error: {e}")))
}

fn projection_exit(e: &ProjectionError) -> i32 {
    match e {
        ProjectionError::SourceInvalid(_)
        | ProjectionError::ResultInvalid { .. }
        | ProjectionError::Unabsorbable { .. }
        | ProjectionError::XorViolation { .. }
        | ProjectionError::NoRuleMatches { .. }
        | ProjectionError::Structural(_) => EXIT_FAIL,
        ProjectionError::Definition(_)
        | ProjectionError::NotationMismatch { .. }
        | ProjectionError::Template { .. }
        | ProjectionError::NoInverseRule(_) => EXIT_USAGE,
    }
}

fn builtin_def(notation: Notation) -> Option<MappingDefinition> {
    match notation {
        Notation::GradeBm => Some(builtin_grade_mapping()),
        Notation::UmlAd => Some(builtin_umlad_mapping()),
        Notation::Nibm => None,
    }
}

pub fn cmd_validate(
    input: &Path,
    notation: Option<Notation>,
    report: Option<&Path>,
) -> CommandOutcome {
    let text = match read_file(input) {
        Ok(t) => t,
        Err(out) => return out,
    };
    let doc = match parse_document(&text, notation) {
        Ok(d) => d,
        Err(out) => return out,
    };
    let result = match validate_document(&doc) {
        Ok(r) => r,
        Err(out) => return out,
    };
    let mut messages = vec![format!(
        "{}: {} [{}]",
        input.display(),
        if result.is_empty() {
            "valid"
        } else {
            "invalid"
        },
        doc.notation()
    )];
    if !result.is_empty() {
        messages.push(result.to_string().trim_end().to_string());
    }
    let mut outcome = CommandOutcome {
        exit_code: if result.is_empty() {
            EXIT_OK
        } else {
            EXIT_FAIL
        },
        report_path: None,
        messages,
    };
    if let Some(path) = report {
        if let Err(out) = write_file(path, &result.to_json()) {
            return out;
        }
        outcome.report_path = Some(path.to_path_buf());
        outcome
            .messages
            .push(format!("report written to {}", path.display()));
    }
    outcome
}

struct Conversion {
    document: Document,
    trace: MappingTrace,
}

fn convert_document(
    doc: &Document,
    to: Notation,
    allow_synthetic: bool,
) -> Result<Conversion, ProjectionError> {
    match (doc, to) {
        (Document::Nibm(m), Notation::Nibm) => {
            // canonical form only; the trace records the renumbering
            let report = validate_nibm(m)?;
            if !report.is_empty() {
                return Err(ProjectionError::SourceInvalid(report));
            }
            let (normalized, remap) = normalize_with_map(m)?;
            let mut trace = MappingTrace::new(Direction::ToNibm);
            for map in [&remap.nodes, &remap.transitions, &remap.performers] {
                for (old, new) in map {
                    trace.push(old.clone(), "normalize", vec![new.clone()]);
                }
            }
            Ok(Conversion {
                document: Document::Nibm(normalized),
                trace,
            })
        }
        (Document::Nibm(m), _) => {
            let def = builtin_def(to).expect("concrete notation");
            let (model, trace) = project_from_nibm(m, &def, allow_synthetic)?;
            Ok(Conversion {
                document: model.into_document(),
                trace,
            })
        }
        (_, Notation::Nibm) => {
            let def = builtin_def(doc.notation()).expect("concrete notation");
            let model_ref = match doc {
                Document::Grade(m) => NotationModelRef::Grade(m),
                Document::Uml(m) => NotationModelRef::Uml(m),
                Document::Nibm(_) => unreachable!(),
            };
            let (nibm, trace) = project_to_nibm(model_ref, &def)?;
            let (normalized, remap) = normalize_with_map(&nibm)?;
            Ok(Conversion {
                document: Document::Nibm(normalized),
                trace: remap_trace(trace, &remap),
            })
        }
        _ => {
            let def_a = builtin_def(doc.notation()).expect("concrete notation");
            let def_b = builtin_def(to).expect("concrete notation");
            let model_ref = match doc {
                Document::Grade(m) => NotationModelRef::Grade(m),
                Document::Uml(m) => NotationModelRef::Uml(m),
                Document::Nibm(_) => unreachable!(),
            };
            let (model, trace) = derive(model_ref, &def_a, &def_b, allow_synthetic)?;
            Ok(Conversion {
                document: model.into_document(),
                trace,
            })
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_convert(
    from: Notation,
    to: Notation,
    input: &Path,
    output: &Path,
    trace_path: Option<&Path>,
    allow_synthetic: bool,
) -> CommandOutcome {
    let text = match read_file(input) {
        Ok(t) => t,
        Err(out) => return out,
    };
    let doc = match parse_document(&text, Some(from)) {
        Ok(d) => d,
        Err(out) => return out,
    };
    let conversion = match convert_document(&doc, to, allow_synthetic) {
        Ok(c) => c,
        Err(e) => {
            return CommandOutcome::fail(projection_exit(&e), format!("conversion failed: {e}"))
        }
    };
    let out_text = match write_document(&conversion.document) {
        Ok(t) => t,
        Err(e) => return CommandOutcome::fail(EXIT_FAIL, format!("cannot serialize result: {e}")),
    };
    if let Err(out) = write_file(output, &out_text) {
        return out;
    }
    let mut messages = vec![format!(
        "converted {} ({}) -> {} ({})",
        input.display(),
        from,
        output.display(),
        to
    )];
    let mut outcome = CommandOutcome::ok(Vec::new());
    if let Some(path) = trace_path {
        if let Err(out) = write_file(path, &conversion.trace.to_json()) {
            return out;
        }
        outcome.report_path = Some(path.to_path_buf());
        messages.push(format!("trace written to {}", path.display()));
    }
    outcome.messages = messages;
    outcome
}

pub fn cmd_trace(
    input: &Path,
    from: Option<Notation>,
    to: Notation,
    report: Option<&Path>,
) -> CommandOutcome {
    let text = match read_file(input) {
        Ok(t) => t,
        Err(out) => return out,
    };
    let doc = match parse_document(&text, from) {
        Ok(d) => d,
        Err(out) => return out,
    };
    // a plain projection keeps the synthesized ids, which spell out the
    // source element, the rule and the template slot they came from
    let projected = match (&doc, to) {
        (Document::Grade(m), Notation::Nibm) => {
            project_to_nibm(NotationModelRef::Grade(m), &builtin_grade_mapping()).map(|(_, t)| t)
        }
        (Document::Uml(m), Notation::Nibm) => {
            project_to_nibm(NotationModelRef::Uml(m), &builtin_umlad_mapping()).map(|(_, t)| t)
        }
        _ => convert_document(&doc, to, false).map(|c| c.trace),
    };
    let trace = match projected {
        Ok(t) => t,
        Err(e) => {
            return CommandOutcome::fail(projection_exit(&e), format!("projection failed: {e}"))
        }
    };
    let trace = &trace;
    let src_width = trace
        .links
        .iter()
        .map(|l| l.source.len())
        .chain(["source".len()])
        .max()
        .unwrap_or(6);
    let rule_width = trace
        .links
        .iter()
        .map(|l| l.rule.len())
        .chain(["rule".len()])
        .max()
        .unwrap_or(4);
    let mut messages = Vec::with_capacity(trace.links.len() + 3);
    messages.push(format!(
        "{:<src_width$}  {:<rule_width$}  produced",
        "source", "rule"
    ));
    for link in &trace.links {
        messages.push(format!(
            "{:<src_width$}  {:<rule_width$}  {}",
            link.source,
            link.rule,
            link.produced.join(", ")
        ));
    }
    let totality = match &doc {
        Document::Grade(m) => check_totality(trace, m),
        Document::Uml(m) => check_totality(trace, m),
        Document::Nibm(m) => check_totality(trace, m),
    };
    messages.push(format!(
        "{} links, totality {}",
        trace.links.len(),
        if totality.is_empty() {
            "ok"
        } else {
            "INCOMPLETE"
        }
    ));
    let mut outcome = CommandOutcome {
        exit_code: if totality.is_empty() {
            EXIT_OK
        } else {
            EXIT_FAIL
        },
        report_path: None,
        messages,
    };
    if let Some(path) = report {
        if let Err(out) = write_file(path, &trace.to_json()) {
            return out;
        }
        outcome.report_path = Some(path.to_path_buf());
    }
    outcome
}

pub fn cmd_check_equiv(
    file_a: &Path,
    file_b: &Path,
    max_states: Option<usize>,
    max_len: Option<usize>,
) -> CommandOutcome {
    let mut bounds = Bounds::default();
    if let Ok(value) = std::env::var("BMX_MAX_STATES") {
        match value.parse() {
            Ok(n) => bounds.max_states = n,
            Err(_) => {
                return CommandOutcome::fail(
                    EXIT_USAGE,
                    format!("BMX_MAX_STATES is not a number: {value:?}"),
                )
            }
        }
    }
    if let Some(n) = max_states {
        bounds.max_states = n;
    }
    if let Some(n) = max_len {
        bounds.max_trace_len = n;
    }
    let doc_a = match read_file(file_a).and_then(|t| parse_document(&t, None)) {
        Ok(d) => d,
        Err(out) => return out,
    };
    let doc_b = match read_file(file_b).and_then(|t| parse_document(&t, None)) {
        Ok(d) => d,
        Err(out) => return out,
    };
    match equivalent(&doc_a, &doc_b, bounds) {
        Ok(Equivalence::Equal) => CommandOutcome::ok(vec!["equal: trace sets coincide".into()]),
        Ok(Equivalence::Different {
            counterexample,
            in_first,
        }) => {
            let side = if in_first { file_a } else { file_b };
            CommandOutcome::fail(
                EXIT_FAIL,
                format!(
                    "not equal: trace [{}] occurs only in {}",
                    counterexample.join(", "),
                    side.display()
                ),
            )
        }
        Ok(Equivalence::Inconclusive) => CommandOutcome::fail(
            EXIT_INCONCLUSIVE,
            format!(
                "inconclusive: enumeration exceeded bounds (max-states {}, max-len {})",
                bounds.max_states, bounds.max_trace_len
            ),
        ),
        Err(OracleError::Projection(e)) => {
            CommandOutcome::fail(projection_exit(&e), format!("cannot compare: {e}"))
        }
        Err(OracleError::Token(e)) => {
            CommandOutcome::fail(EXIT_FAIL, format!("cannot compare: {e}"))
        }
    }
}

pub fn cmd_roundtrip(input: &Path, to: Notation) -> CommandOutcome {
    let text = match read_file(input) {
        Ok(t) => t,
        Err(out) => return out,
    };
    let doc = match parse_document(&text, None) {
        Ok(d) => d,
        Err(out) => return out,
    };
    let from = doc.notation();
    // there and back again
    let there = match convert_document(&doc, to, false) {
        Ok(c) => c,
        Err(e) => {
            return CommandOutcome::fail(projection_exit(&e), format!("conversion failed: {e}"))
        }
    };
    let back = if to == from {
        there
    } else {
        match convert_document(&there.document, from, false) {
            Ok(c) => c,
            Err(e) => {
                return CommandOutcome::fail(
                    projection_exit(&e),
                    format!("conversion back failed: {e}"),
                )
            }
        }
    };
    let iso = match (&doc, &back.document) {
        (Document::Grade(a), Document::Grade(b)) => bmx_core::grade::isomorphic_grade(a, b),
        (Document::Uml(a), Document::Uml(b)) => bmx_core::umlad::isomorphic_umlad(a, b),
        (Document::Nibm(a), Document::Nibm(b)) => isomorphic(a, b),
        _ => unreachable!("round trip changes notation"),
    };
    match iso {
        Ok(out) if out.is_isomorphic() => CommandOutcome::ok(vec![format!(
            "round trip via {to} preserves the model up to isomorphism"
        )]),
        Ok(_) => CommandOutcome::fail(
            EXIT_FAIL,
            "round trip result is not isomorphic to the input",
        ),
        Err(e) => CommandOutcome::fail(EXIT_FAIL, format!("isomorphism check failed: {e}")),
    }
}
