//! The JSON interchange envelope shared by all notations.
//!
//! Every document is `{"notation": <tag>, "process": {...}}`; the tag
//! selects the reader. Readers give precise errors with a document path
//! (`tasks[0]`, `flows[2]`) instead of leaning on serde messages, and
//! writers refuse structurally broken models rather than emit documents
//! that cannot be read back.

use crate::grade::{read_grade, write_grade, GradeProcess};
use crate::nibm::{read_nibm, write_nibm, NibmProcess};
use crate::report::StructuralError;
use crate::umlad::{read_umlad, write_umlad, UmlActivity};
use thiserror::Error;

/// Notation tags as they appear in documents and on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Notation {
    GradeBm,
    UmlAd,
    Nibm,
}

impl Notation {
    pub fn tag(&self) -> &'static str {
        match self {
            Notation::GradeBm => "grade-bm",
            Notation::UmlAd => "uml-ad",
            Notation::Nibm => "nibm",
        }
    }

    pub fn parse(s: &str) -> Option<Notation> {
        Some(match s {
            "grade-bm" => Notation::GradeBm,
            "uml-ad" => Notation::UmlAd,
            "nibm" => Notation::Nibm,
            _ => return None,
        })
    }
}

impl std::fmt::Display for Notation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Error)]
pub enum ReadError {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("unknown notation tag {0:?}")]
    UnknownNotation(String),
    #[error("expected notation {expected:?}, found {found:?}")]
    NotationMismatch {
        expected: &'static str,
        found: String,
    },
    #[error("duplicate id {id} at {path}")]
    DuplicateId { id: String, path: String },
    #[error("dangling source {id} at {path}")]
    DanglingSource { id: String, path: String },
    #[error("dangling target {id} at {path}")]
    DanglingTarget { id: String, path: String },
    #[error("illegal {attribute} value at {path}: {value:?}")]
    IllegalAttribute {
        attribute: &'static str,
        path: String,
        value: String,
    },
    #[error("guard only on decision edges ({path})")]
    GuardPlacement { path: String },
}

#[derive(Debug, Error)]
pub enum WriteError {
    #[error("refusing to write structurally invalid model: {0}")]
    Structural(#[from] StructuralError),
}

/// A parsed document of any supported notation.
#[derive(Debug, Clone)]
pub enum Document {
    Grade(GradeProcess),
    Uml(UmlActivity),
    Nibm(NibmProcess),
}

impl Document {
    pub fn notation(&self) -> Notation {
        match self {
            Document::Grade(_) => Notation::GradeBm,
            Document::Uml(_) => Notation::UmlAd,
            Document::Nibm(_) => Notation::Nibm,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Document::Grade(m) => &m.name,
            Document::Uml(m) => &m.name,
            Document::Nibm(m) => &m.name,
        }
    }
}

/// Peek at the notation tag without committing to a reader.
pub fn detect_notation(text: &str) -> Result<Notation, ReadError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| ReadError::Malformed(e.to_string()))?;
    let tag = value
        .get("notation")
        .and_then(|v| v.as_str())
        .ok_or_else(|| ReadError::Malformed("missing \"notation\" tag".into()))?;
    Notation::parse(tag).ok_or_else(|| ReadError::UnknownNotation(tag.to_string()))
}

/// Read a document, dispatching on its notation tag.
pub fn read_document(text: &str) -> Result<Document, ReadError> {
    match detect_notation(text)? {
        Notation::GradeBm => read_grade(text).map(Document::Grade),
        Notation::UmlAd => read_umlad(text).map(Document::Uml),
        Notation::Nibm => read_nibm(text).map(Document::Nibm),
    }
}

pub fn write_document(doc: &Document) -> Result<String, WriteError> {
    match doc {
        Document::Grade(m) => write_grade(m),
        Document::Uml(m) => write_umlad(m),
        Document::Nibm(m) => write_nibm(m),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detect_rejects_missing_tag() {
        let err = detect_notation("{\"process\":{}}").unwrap_err();
        assert!(err.to_string().contains("notation"));
    }

    #[test]
    fn detect_rejects_unknown_tag() {
        let err = detect_notation("{\"notation\":\"bpmn\"}").unwrap_err();
        assert!(matches!(err, ReadError::UnknownNotation(t) if t == "bpmn"));
    }
}
