//! Exact arithmetic for perfect quadratic forms and the perfect cone
//! (first Voronoi) decomposition of the positive semidefinite cone.
//!
//! Everything here is computed over arbitrary-precision rationals; no
//! floating point enters any accept/reject decision. The crate covers:
//!
//! - exact linear algebra, definiteness analysis and a rational simplex
//!   kernel ([`exact`]),
//! - shortest-vector enumeration for positive definite forms ([`shortvec`]),
//! - perfect forms, their cones, Voronoi neighbors and the full
//!   enumeration of perfect forms per rank ([`perfection`]),
//! - the perfect cone fan: membership certificates, co-core heights,
//!   direct sums and one-step extensions ([`conefan`]),
//! - toric singularity certificates for cones of the fan ([`toricsing`]),
//! - exact minimization of fractional-part sums over unit residues
//!   ([`taibound`]),
//! - divisor-class arithmetic on the rank-2 Picard group spanned by the
//!   weight-1 modular class and the boundary ([`picard`]),
//! - catalog persistence and verification ([`shell`]).

pub mod conefan;
pub mod exact;
pub mod perfection;
pub mod picard;
pub mod shell;
pub mod shortvec;
pub mod taibound;
pub mod toricsing;

use thiserror::Error;

/// Arbitrary-precision rational scalar used throughout the crate.
pub type Rat = num_rational::BigRational;
/// Arbitrary-precision integer scalar.
pub type Int = num_bigint::BigInt;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("zero vector not allowed")]
    ZeroVector,
    #[error("form is not positive definite")]
    NotPositiveDefinite,
    #[error("form is not positive semidefinite")]
    NotPositiveSemidefinite,
    #[error("form is not perfect")]
    NotPerfect,
    #[error("matrix is not unimodular (determinant {0})")]
    NotUnimodular(Int),
    #[error("malformed linear program: {0}")]
    MalformedProgram(String),
    #[error("index {index} out of range ({len} available)")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("rank {0} outside the supported range {1}")]
    UnsupportedRank(usize, &'static str),
    #[error("scan budget exceeded: {candidates} candidate points > budget {budget}")]
    BudgetExceeded { candidates: u128, budget: u128 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("internal certification failure: {0}")]
    Certification(String),
    #[error("catalog format version {found} unsupported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("catalog digest mismatch (file corrupt or tampered)")]
    DigestMismatch,
    #[error("catalog verification failed: {0}")]
    CatalogInvalid(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn rat_int(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}
