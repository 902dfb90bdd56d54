//! Stratified sampling along the Hilbert space-filling curve, star-discrepancy
//! computation, and the closed-form discrepancy bounds that go with them.
//!
//! The crate is organized around five building blocks:
//!
//! * [`hilbert`] — exact integer encode/decode of the d-dimensional Hilbert
//!   curve and the map from unit-interval fractions to cube points.
//! * [`sampler`] — point-set generators: HSFC stratified samples (scrambled
//!   van der Corput or direct jitter), plain Monte Carlo, jittered grids,
//!   Latin hypercube, and a one-parameter family of equivolume partitions
//!   obtained by slicing a merged rectangle at an angle θ.
//! * [`discrepancy`] — exact star discrepancy on desk-scale instances,
//!   δ-cover enclosures, weighted and convex-region-restricted variants, and
//!   expected-discrepancy estimation over replications.
//! * [`bounds`] — evaluators for the probabilistic discrepancy bounds
//!   (HSFC stratified and Monte Carlo) and related closed forms.
//! * [`integrate`] — built-in integrands with exact integrals and
//!   Hardy–Krause-style variation, plus Koksma–Hlawka error-bound checks.
//!
//! Everything is deterministic: generators take an explicit [`rng::RngState`]
//! keyed by a master seed and a stream label, so identical inputs produce
//! identical outputs, including across threads.

pub mod bounds;
pub mod discrepancy;
pub mod hilbert;
pub mod integrate;
pub(crate) mod quadrature;
pub mod rng;
pub mod sampler;
pub mod stats;

/// Errors shared by the sampling and discrepancy operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// `level * d` would exceed the supported index width.
    #[error("hilbert index needs {required} bits but only {max} are supported")]
    PrecisionExceeded { required: u32, max: u32 },

    /// A cell coordinate does not fit the requested refinement level.
    #[error("coordinate {value} out of range for level {level} (must be < 2^{level})")]
    CoordinateOutOfRange { value: u64, level: u32 },

    /// An enumeration would exceed the configured work budget.
    #[error("{what} needs a work budget of {required} (configured budget {budget})")]
    BudgetExceeded {
        what: &'static str,
        required: u128,
        budget: u128,
    },

    /// Point/evaluation dimensions disagree.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// A parameter violates its documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Rejection sampling exhausted its attempt budget.
    #[error("rejection sampling failed after {attempts} attempts")]
    RejectionBudget { attempts: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
