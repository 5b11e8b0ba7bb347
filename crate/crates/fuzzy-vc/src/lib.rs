//! Exact combinatorics of fuzzy set systems and real-valued function classes.
//!
//! A fuzzy set is a pair of disjoint subsets: the points definitely inside
//! and the points definitely outside; everything else is indeterminate.
//! This crate computes, with exact rational arithmetic wherever a quantity
//! is discrete or rational:
//!
//! - shatter functions, VC-type dimensions, duals, and strong
//!   disambiguations of fuzzy set systems ([`system`], [`disamb`]);
//! - gap-parameterized dimensions, Rademacher/Gaussian mean widths,
//!   ε-approximations, and ℓ∞ covering/packing numbers of function
//!   classes ([`function_class`], [`width`], [`approx`], [`covering`]);
//! - fractional transversals and packings by exact simplex with dual
//!   certificates, and exact minimum hitting sets ([`lp`], [`transversal`]);
//! - ε-nets and the net-based transversal pipeline ([`nets`]);
//! - the fractional Helly witness search and the (p,q) pipeline with
//!   verified stage records ([`helly`], [`pq`]);
//! - instance file formats, seeded generators, run reports, and the
//!   self-test battery behind the `fuzzyvc` binary ([`instance`],
//!   [`generate`], [`report`], [`selftest`]).

pub mod approx;
mod cover;
pub mod covering;
pub mod disamb;
pub mod function_class;
pub mod generate;
pub mod helly;
pub mod instance;
pub mod lp;
pub mod measure;
pub mod nets;
pub mod pq;
pub mod rat;
pub mod report;
pub mod selftest;
pub mod system;
pub mod transversal;
pub mod width;

pub use function_class::FunctionClass;
pub use measure::DiscreteMeasure;
pub use rat::Rat;
pub use system::{FuzzyRelation, FuzzySet, FuzzySetSystem, Mark, SetSystem};

/// Error type shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument is outside the operation's documented domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The instance is too large for an exhaustive operation.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// A linear program or hitting-set instance has no feasible point.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// A search exhausted its budget without producing a witness.
    #[error("not found: {reason}{}", best_deviation.as_ref().map(|d| format!(" (best deviation {d})")).unwrap_or_default())]
    NotFound {
        reason: String,
        /// Best max-row deviation seen by an approximation search, when any.
        best_deviation: Option<Rat>,
    },

    /// A stated hypothesis of a theorem pipeline does not hold on the input.
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    /// Input bytes failed schema or invariant validation.
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },

    /// An internal certificate failed re-verification; indicates a bug.
    #[error("internal verification failure: {0}")]
    Internal(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }

    /// Process exit code used by the CLI for this error kind.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
