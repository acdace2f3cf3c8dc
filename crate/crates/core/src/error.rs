use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("cos^2 of half of {0} degrees is not an exactly representable rational; use approximate mode")]
    NotExactlyRepresentable(i64),

    #[error("value {0} is not finite")]
    NonFinite(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid outcome label: {0}")]
    InvalidLabel(String),

    #[error("kernel has no outcomes")]
    EmptyKernel,

    #[error("probabilities sum to {0}, expected exactly 1")]
    ProbabilitySum(String),

    #[error("probability of {label} is {value}; kernel probabilities must be strictly positive")]
    NonPositiveProbability { label: String, value: String },

    #[error("kernel total {total} exceeds the enumeration cap {cap}")]
    EnumerationCap { total: String, cap: String },

    #[error("unsupported query on symbolic power kernel: {0}")]
    UnsupportedQuery(String),

    #[error("boost velocity {0} must satisfy |v| < 1")]
    Superluminal(f64),

    #[error(
        "events {0} and {1} are not spacelike separated; their order is the same in every frame"
    )]
    NoReversingFrame(String, String),

    #[error("at least one event is required")]
    NoEvents,

    #[error("correlator has no conditional kernel for event {event} after {history}")]
    MissingConditional { event: String, history: String },

    #[error("inconsistent correlator: viewer orders give different joints ({0})")]
    InconsistentCorrelator(String),

    #[error(
        "ensemble class {class} of size {size} cannot be split by kernel total {total}; \
         smallest sufficient ensemble size is {suggested}"
    )]
    IndivisibleEnsemble {
        class: String,
        size: u64,
        total: String,
        suggested: String,
    },

    #[error("live cell budget {budget} exceeded at h = {h} ({live} live cells)")]
    CellBudget {
        h: usize,
        live: usize,
        budget: usize,
    },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
