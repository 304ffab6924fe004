use thiserror::Error;

use crate::system::Species;

/// Errors produced by validation and the solver pipeline.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A field of the input record violates one of its constraints.
    #[error("invalid {field}: {constraint} (got {value})")]
    Validation {
        field: &'static str,
        constraint: &'static str,
        value: String,
    },

    /// Pair indices outside `1 <= i < j <= N`.
    #[error("pair index ({i},{j}) out of domain for N={n}")]
    PairIndexDomain { i: usize, j: usize, n: usize },

    /// Mode, row, or vector index outside its valid range.
    #[error("index {what} = {got} out of range (expected {expected})")]
    IndexDomain {
        what: &'static str,
        got: usize,
        expected: String,
    },

    /// Vector length does not match the problem dimensions.
    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    /// The requested species carries no coordinates at this particle count.
    #[error("species {species} is absent for N={n}")]
    SpeciesAbsent { species: Species, n: usize },

    /// The kinetic matrix is not positive definite.
    #[error("G is not positive definite: {detail}")]
    SpdViolation { detail: String },

    /// A matrix that must be symmetric is not.
    #[error("{what} is not symmetric (asymmetry {asymmetry:.3e})")]
    NotSymmetric { what: &'static str, asymmetry: f64 },

    /// The reduced eigenproblem has a complex-conjugate root pair, meaning
    /// the configuration is not a stable minimum.
    #[error("unstable structure in species {species}: complex root pair {re} +/- {im}i")]
    UnstableStructure { species: Species, re: f64, im: f64 },

    /// A mode frequency is imaginary (lambda < 0), so an oscillator
    /// wave function or energy cannot be formed.
    #[error("unstable mode {label}: lambda = {lambda} < 0")]
    UnstableMode { label: String, lambda: f64 },

    /// The two mixing angles coincide, so the mode-to-internal map
    /// cannot be inverted.
    #[error("degenerate mixing basis in species {species}: |sin(theta+ - theta-)| = {s_abs} < 1e-12")]
    DegenerateBasis { species: Species, s_abs: f64 },

    /// Occupancy request inconsistent with the manifold multiplicities.
    #[error("invalid occupancy for {mu}: {detail}")]
    Occupancy { mu: String, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
