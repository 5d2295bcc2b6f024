//! Exact distributions, samplers, and bound audits for best-of-n and
//! soft best-of-n selection over finite alphabets.
//!
//! The crate is organised around a small set of value types:
//!
//! * [`FiniteDistribution`] / [`RewardFunction`] / [`Temperature`] describe a
//!   reward-tilting problem on a finite alphabet.
//! * [`exact`] computes the *exact* output distribution of best-of-n and
//!   soft best-of-n selection by enumerating companion count vectors,
//!   grouped by distinct reward level, entirely in log space.
//! * [`sampler`] draws from the same policies with a counter-based RNG so
//!   every draw is reproducible from a `(seed, stream)` pair.
//! * [`blockwise`] lifts a per-symbol model to length-m sequences with the
//!   mean-of-symbol-rewards sequence reward.
//! * [`audit`] checks closed-form divergence and reward bounds against the
//!   exact quantities and reports machine-checkable margins.
//!
//! All divergences use natural logarithms.

pub mod audit;
pub mod blockwise;
pub mod dist;
pub mod exact;
pub mod sampler;
pub mod suite;

pub use audit::{BoundReport, RateFit, SymbolwiseAnalysis};
pub use blockwise::{BlockModel, SequenceDistribution, SymbolwiseBlockwiseComparison};
pub use dist::{FiniteDistribution, RewardFunction, Temperature};
pub use exact::{EnumerationBudget, SamplingPolicy, SelectionStrategy};
pub use sampler::{EmpiricalDistribution, RngSeed, SamplerConfig};

/// Errors shared across the crate. Constructors validate eagerly so the
/// numeric kernels can assume well-formed inputs.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("distributions are defined over different alphabets")]
    AlphabetMismatch,
    #[error("alphabet is empty")]
    EmptyAlphabet,
    #[error("probability at index {index} is {value}, outside [0, 1]")]
    InvalidProbability { index: usize, value: f64 },
    #[error("probabilities sum to {sum:e}, not 1")]
    NotNormalized { sum: f64 },
    #[error("duplicate symbol {symbol:?}")]
    DuplicateSymbol { symbol: String },
    #[error("reward at index {index} is not finite ({value})")]
    NonFiniteReward { index: usize, value: f64 },
    #[error("temperature must be a positive finite real, got {lambda}")]
    InvalidTemperature { lambda: f64 },
    #[error("draw count n must be at least 1")]
    ZeroDraws,
    #[error("enumeration needs {required} terms, budget allows {max_terms}")]
    EnumerationOverflow { required: u128, max_terms: u64 },
    #[error("sequence alphabet needs {required} entries, limit is {limit}")]
    AlphabetOverflow { required: u128, limit: u64 },
    #[error("reward for symbol {symbol:?} is {value}, outside [0, 1]")]
    RewardOutOfRange { symbol: String, value: f64 },
    #[error("symbol index {index} out of range for alphabet of size {alphabet}")]
    UnknownSymbol { index: usize, alphabet: usize },
    #[error("degenerate instance: {reason}")]
    DegenerateInstance { reason: &'static str },
    #[error("{param} must be {constraint}, got {value}")]
    OutOfDomain {
        param: &'static str,
        constraint: &'static str,
        value: f64,
    },
    #[error("rate fit needs at least {needed} grid points, got {got}")]
    ShortGrid { needed: usize, got: usize },
    #[error("rate fit requires strictly increasing n and positive values")]
    BadGrid,
    #[error("internal invariant violated: {0}")]
    Internal(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
