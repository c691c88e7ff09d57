//! Construction and symmetry analysis of two-step nilpotent Lie algebras
//! built from admissible Clifford modules.
//!
//! The crate builds minimal admissible modules for any metric signature,
//! assembles them into pseudo H-type Lie algebras, computes the exact
//! dimension of the automorphism groups, and checks the results against a
//! catalog of expected classical group types.  All arithmetic is exact:
//! generator actions are signed permutations and ranks are taken over the
//! rationals or, for large systems, over two independent prime fields.

pub mod algebra;
pub mod build;
pub mod catalog;
pub mod involution;
pub mod iso;
pub mod linalg;
pub mod pinaut;
pub mod rep;
pub mod verify;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HtypeError {
    #[error("invalid module: {0}")]
    InvalidModule(String),

    #[error("invalid signature: {0}")]
    InvalidSignature(String),

    #[error("construction failed at ({r}, {s}): {reason}")]
    Construction { r: u32, s: u32, reason: String },

    #[error("involution system: {0}")]
    Involution(String),

    #[error("automorphism solver: {0}")]
    Solver(String),

    #[error("catalog: {0}")]
    Catalog(String),

    #[error("extension from the eigenspace failed: {0}")]
    Extension(String),

    #[error(transparent)]
    Clifford(#[from] clifford_exact::CliffordError),
}
