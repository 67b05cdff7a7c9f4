//! Isomorphism between two process graphs, kind-, label- and
//! structure-preserving. Performer identity is compared by referent, not
//! by performer id.

use super::NibmProcess;
use crate::iso::{self, IsoOutcome};
use crate::report::StructuralError;

pub fn isomorphic(a: &NibmProcess, b: &NibmProcess) -> Result<IsoOutcome, StructuralError> {
    Ok(iso::isomorphic(&a.to_digraph()?, &b.to_digraph()?))
}
