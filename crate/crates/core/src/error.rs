//! Unified error type for the crate.
//!
//! Every fallible public operation returns [`Result`]. Variants distinguish
//! invalid *input* (bad lattice, malformed string, qubit mismatch) from
//! *runtime* failures of a physically meaningful step (impossible
//! post-selection, a stabilizer set that cannot be fixed) so callers can map
//! them to different exit paths.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("qubit count mismatch: left operand has {left}, right has {right}")]
    QubitMismatch { left: usize, right: usize },

    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },

    #[error("cannot parse Pauli string {0:?}")]
    ParseString(String),

    #[error("link parity violated: pair ({a}, {b}) mixes a diagonal and an off-diagonal letter")]
    LinkParityViolated { a: usize, b: usize },

    #[error("merge map is not a bijection onto the reduced qubit set: {0}")]
    BadMergeMap(String),

    #[error("dense matrix capped at {cap} qubits, operator has {n}")]
    DenseCapExceeded { n: usize, cap: usize },

    #[error("{what} capped at {cap} qubits, requested {n}")]
    SizeCapExceeded { what: &'static str, n: usize, cap: usize },

    #[error("operator is not Hermitian where a Hermitian one is required: {0}")]
    NonHermitian(String),

    #[error("propagator of the identity string is a global phase; refusing to compile it")]
    IdentityPropagator,

    #[error("circuit width {circuit} does not match state width {state}")]
    WidthMismatch { circuit: usize, state: usize },

    #[error("classical bit {bit} out of range ({n} bits)")]
    ClassicalBitOutOfRange { bit: usize, n: usize },

    #[error("post-selection impossible: outcome probability {prob:.3e} below threshold")]
    PostSelectionImpossible { prob: f64 },

    #[error("state lies outside the stabilizer sector: residual norm {residual:.3e}")]
    StateOutsideSector { residual: f64 },

    #[error("inconsistent stabilizer set: {0}")]
    InconsistentStabilizers(String),

    #[error("charge injection is only defined at the corner carrying the extra rishon: {0}")]
    BadInjectionSite(String),

    #[error("layout has no extra rishon but the operation requires one")]
    MissingExtraRishon,

    #[error("eigensolver did not converge: {0}")]
    NoConvergence(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
