use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vector must have at least one component")]
    EmptyVector,

    #[error("component {index} is not finite ({value})")]
    NonFiniteComponent { index: usize, value: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("odd root of a negative power sum (k = {k}, sum = {sum})")]
    NegativeBaseOddRoot { k: u32, sum: f64 },

    #[error("exp overflow: e^{exponent} is not representable")]
    Overflow { exponent: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("both vectors are zero, so the scale denominator vanishes")]
    DegenerateScale,

    #[error("integrand is not finite at {point:?}")]
    NonFiniteIntegrand { point: Vec<f64> },

    #[error("refinement budget exhausted: best value {value}, estimate {error_estimate}")]
    BudgetExceeded { value: f64, error_estimate: f64 },

    #[error("no closed form for sheet {sheet} with k = {k}")]
    UnsupportedSheetReduction { sheet: String, k: u32 },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("pairing is not antisymmetric")]
    PairingNotAntisymmetric,

    #[error("constraint unsatisfiable after {attempts} attempts: {reason}")]
    ConstraintUnsatisfiable { attempts: u32, reason: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// Stable machine-readable name, used in CLI error documents.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyVector => "EmptyVector",
            Error::NonFiniteComponent { .. } => "NonFiniteComponent",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::NegativeBaseOddRoot { .. } => "NegativeBaseOddRoot",
            Error::Overflow { .. } => "Overflow",
            Error::Domain(_) => "DomainError",
            Error::DegenerateScale => "DegenerateScale",
            Error::NonFiniteIntegrand { .. } => "NonFiniteIntegrand",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::UnsupportedSheetReduction { .. } => "UnsupportedSheetReduction",
            Error::HypothesisViolated(_) => "HypothesisViolated",
            Error::PairingNotAntisymmetric => "PairingNotAntisymmetric",
            Error::ConstraintUnsatisfiable { .. } => "ConstraintUnsatisfiable",
            Error::InvalidConfig(_) => "InvalidConfig",
        }
    }

    /// Errors caused by the numbers themselves rather than by bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFiniteIntegrand { .. } | Error::BudgetExceeded { .. } | Error::Overflow { .. }
        )
    }
}
