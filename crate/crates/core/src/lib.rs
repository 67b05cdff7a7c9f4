//! Business process model transpiler.
//!
//! Two concrete business-modeling notations are supported: a GRADE-BM
//! style one, where flow unification and branching are task attributes,
//! and a UML-2.0 activity diagram fragment, where they are explicit
//! control nodes. Neither maps to the other directly; both map to a
//! notation-independent process metamodel ([`nibm`]), and the derived
//! notation-to-notation translation is the composition of the two
//! primary mappings.
//!
//! The crate is organized along that pipeline:
//!
//! - [`nibm`]: the independent process graph, its validator, canonical
//!   normalization and isomorphism check
//! - [`grade`], [`umlad`]: native metamodels with JSON readers, writers
//!   and validators
//! - [`mapping`]: declarative, guarded, XOR-constrained class mappings;
//!   projections in both directions; derived mappings; instance traces
//! - [`token`]: a bounded token-game executor used as the behavioral
//!   oracle that translations preserve control flow
//! - [`interchange`]: the shared JSON envelope and notation dispatch
//!
//! All models are immutable values and every operation is a pure
//! function, so anything here can run concurrently on shared data.

pub mod grade;
pub mod interchange;
pub mod iso;
pub mod mapping;
pub mod nibm;
pub mod report;
pub mod token;
pub mod umlad;

pub use grade::{read_grade, validate_grade, write_grade, GradeProcess};
pub use interchange::{detect_notation, read_document, write_document, Document, Notation};
pub use mapping::{
    builtin_grade_mapping, builtin_umlad_mapping, check_totality, derive, project_from_nibm,
    project_to_nibm, MappingDefinition, MappingTrace, NotationModel, NotationModelRef,
};
pub use nibm::{isomorphic, normalize, read_nibm, validate_nibm, write_nibm, NibmProcess};
pub use report::{StructuralError, ValidationReport, Violation};
pub use token::{enumerate_traces, equivalent, Bounds, Equivalence, TraceSet};
pub use umlad::{read_umlad, validate_umlad, write_umlad, UmlActivity};
