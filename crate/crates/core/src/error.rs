use thiserror::Error;

/// Errors raised by the series substrate and everything built on it.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum TodaError {
    #[error("window underflow: product window [{lo}, {hi}] is empty")]
    WindowUnderflow { lo: i32, hi: i32 },

    #[error("non-invertible leading term (|c| = {modulus:e})")]
    NonInvertibleLeadingTerm { modulus: f64 },

    #[error("zero leading coefficient")]
    ZeroLeadingCoefficient,

    #[error("nonzero constant term in log1p argument")]
    NonzeroConstantTerm,

    #[error("series is not strictly decaying in its flavor direction")]
    NotDecaying,

    #[error("expansion direction is ambiguous for a {0} series")]
    AmbiguousExpansion(&'static str),

    #[error("denominator vanishes on circle (min |den| = {min_modulus:e})")]
    DenominatorVanishes { min_modulus: f64 },

    #[error("circle grid of {samples} samples cannot resolve a window of width {width}")]
    GridTooSmall { samples: usize, width: usize },

    #[error("vanishing leading coefficient in functional inversion")]
    VanishingLeadingCoefficient,

    #[error("a1·b ≠ 1 (|a1·b − 1| = {defect:e})")]
    Normalization { defect: f64 },

    #[error("f(0) ≠ 0")]
    NonzeroConstantInF,

    #[error("invalid pair: {0}")]
    InvalidPair(String),

    #[error("log obstruction in J construction: terms {0:?} and {1:?}")]
    LogObstruction((i32, i32), (i32, i32)),

    #[error("invalid hamiltonian: {0}")]
    InvalidHamiltonian(String),

    #[error("H not Σ-admissible: {0}")]
    NotSigmaAdmissible(String),

    #[error("flow left chart (normalization drift {drift:e})")]
    FlowLeftChart { drift: f64 },

    #[error("index {index} outside supported range (order {order})")]
    IndexOutOfRange { index: i32, order: usize },

    #[error("window budget exceeded: |μ| + |ν| + N = {needed} needs depth above {depth}")]
    WindowBudget { needed: usize, depth: usize },

    #[error("B_0 = log w has no polynomial form")]
    LogFaberPolynomial,
}

pub type Result<T> = std::result::Result<T, TodaError>;
