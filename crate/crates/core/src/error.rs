use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PricingError {
    #[error("nonpositive {0}")]
    Nonpositive(&'static str),
    #[error("negative interest rate")]
    NegativeRate,
    #[error("non-finite {0}")]
    NonFinite(&'static str),
    #[error("knocked out at inception")]
    KnockedAtInception,
    #[error("wrong regime: {0}")]
    WrongRegime(String),
    #[error("degenerate tree: up-probability {p} outside (0, 1) at {steps} steps")]
    DegenerateTree { steps: usize, p: f64 },
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("spot outside mesh")]
    SpotOutsideMesh,
    #[error("non-ascending abscissae")]
    NonAscending,
    #[error("enumeration limited to {max} steps, got {steps}")]
    TooManySteps { steps: usize, max: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("io: {0}")]
    Io(String),
}

/// Coarse classification used by the CLI to choose an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad user input: malformed or out-of-domain parameters.
    Argument,
    /// Input was well-formed but the requested computation is not defined for it.
    Numerical,
    Io,
}

impl PricingError {
    pub fn kind(&self) -> ErrorKind {
        use PricingError::*;
        match self {
            Nonpositive(_) | NegativeRate | NonFinite(_) | InvalidArgument(_) | NonAscending => ErrorKind::Argument,
            KnockedAtInception
            | WrongRegime(_)
            | DegenerateTree { .. }
            | Unsupported(_)
            | SpotOutsideMesh
            | TooManySteps { .. } => ErrorKind::Numerical,
            Io(_) => ErrorKind::Io,
        }
    }

    /// Short stable identifier for machine-readable error lines.
    pub fn code(&self) -> &'static str {
        use PricingError::*;
        match self {
            Nonpositive(_) => "nonpositive",
            NegativeRate => "negative_rate",
            NonFinite(_) => "non_finite",
            KnockedAtInception => "knocked_at_inception",
            WrongRegime(_) => "wrong_regime",
            DegenerateTree { .. } => "degenerate_tree",
            Unsupported(_) => "unsupported",
            SpotOutsideMesh => "spot_outside_mesh",
            NonAscending => "non_ascending",
            TooManySteps { .. } => "too_many_steps",
            InvalidArgument(_) => "invalid_argument",
            Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for PricingError {
    fn from(e: std::io::Error) -> Self {
        PricingError::Io(e.to_string())
    }
}

impl From<csv::Error> for PricingError {
    fn from(e: csv::Error) -> Self {
        PricingError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for PricingError {
    fn from(e: serde_json::Error) -> Self {
        PricingError::Io(e.to_string())
    }
}

pub type Result<T, E = PricingError> = std::result::Result<T, E>;
