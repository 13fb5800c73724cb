use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WetError {
    /// A scenario or file field failed validation. Carries the field name.
    #[error("invalid `{field}`: {reason}")]
    InvalidField { field: String, reason: String },

    #[error("training energy {q} J outside the admissible range {range}")]
    TrainingEnergy { q: f64, range: String },

    #[error("infeasible beam weights: {0}")]
    InfeasibleWeights(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("degenerate channel estimate for ER {0}")]
    DegenerateEstimate(usize),

    #[error("{0}")]
    Unsupported(String),

    #[error("failed to parse scenario: {0}")]
    Parse(String),
}

impl WetError {
    pub(crate) fn field(field: impl Into<String>, reason: impl Into<String>) -> Self {
        WetError::InvalidField {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, WetError>;
