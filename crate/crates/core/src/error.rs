use thiserror::Error;

/// Every failure the toolkit reports. Each variant maps to a stable
/// machine-readable code through [`Error::code`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("set of points is empty")]
    EmptySet,
    #[error("space has fewer than two points")]
    DegenerateSpace,
    #[error("the two points coincide")]
    SamePoint,
    #[error("function has zero Lipschitz norm")]
    ZeroFunction,
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("index {index} out of range for {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("duplicate point at positions {0} and {1}")]
    DuplicatePoint(usize, usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("geometric series diverges: |K(x,y)| = {modulus} >= 1")]
    GeomDiverges { modulus: f64 },
    #[error("point outside the domain: {0}")]
    OutOfDomain(String),
    #[error("at sample pair ({i}, {j}): {source}")]
    AtPair {
        i: usize,
        j: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("matrix is not Hermitian at ({i}, {j})")]
    NotHermitian { i: usize, j: usize },

    #[error("Gram matrix is numerically singular (condition {condition:e})")]
    DegenerateGram { condition: f64 },
    #[error("norm bracket exceeded {limit:e} without becoming feasible")]
    Unbounded { limit: f64 },
    #[error("symbol is not certified contractive: {0}")]
    SymbolNotContractive(String),
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,

    #[error("depth {depth} exceeds available sequence length {available}")]
    DepthExceedsSequence { depth: usize, available: usize },
    #[error("g_{0} vanishes identically; the finite space is exhausted")]
    ExhaustedSpace(usize),
    #[error("{len} coefficients exceed model capacity {max}")]
    CoefficientOverflow { len: usize, max: usize },
    #[error("triangular pivot g_{0}(y_{{{0}+1}}) is too small")]
    IllConditionedPrefix(usize),
    #[error("no sequence point within eps/2 of the probe in the model prefix")]
    PrefixTooShallow,
    #[error("invalid dense sequence: {0}")]
    InvalidSequence(String),

    #[error("point is not in the open unit disk")]
    NotInDisk,
    #[error("pattern length {0} exceeds the budget of 12")]
    PatternBudgetExceeded(usize),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptySet => "EmptySet",
            Error::DegenerateSpace => "DegenerateSpace",
            Error::SamePoint => "SamePoint",
            Error::ZeroFunction => "ZeroFunction",
            Error::InvalidMetric(_) => "InvalidMetric",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::DuplicatePoint(..) => "DuplicatePoint",
            Error::InvalidInput(_) => "InvalidInput",
            Error::GeomDiverges { .. } => "GeomDiverges",
            Error::OutOfDomain(_) => "OutOfDomain",
            Error::AtPair { source, .. } => source.code(),
            Error::NotHermitian { .. } => "NotHermitian",
            Error::DegenerateGram { .. } => "DegenerateGram",
            Error::Unbounded { .. } => "Unbounded",
            Error::SymbolNotContractive(_) => "SymbolNotContractive",
            Error::NoConvergence => "NoConvergence",
            Error::DepthExceedsSequence { .. } => "DepthExceedsSequence",
            Error::ExhaustedSpace(_) => "ExhaustedSpace",
            Error::CoefficientOverflow { .. } => "CoefficientOverflow",
            Error::IllConditionedPrefix(_) => "IllConditionedPrefix",
            Error::PrefixTooShallow => "PrefixTooShallow",
            Error::InvalidSequence(_) => "InvalidSequence",
            Error::NotInDisk => "NotInDisk",
            Error::PatternBudgetExceeded(_) => "PatternBudgetExceeded",
        }
    }

    /// True for failures of a numerical procedure on otherwise valid input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::AtPair { source, .. } => source.is_numerical(),
            Error::GeomDiverges { .. }
            | Error::DegenerateGram { .. }
            | Error::Unbounded { .. }
            | Error::SymbolNotContractive(_)
            | Error::NoConvergence
            | Error::ExhaustedSpace(_)
            | Error::IllConditionedPrefix(_)
            | Error::PrefixTooShallow => true,
            _ => false,
        }
    }

    pub(crate) fn at_pair(i: usize, j: usize, source: Error) -> Self {
        Error::AtPair {
            i,
            j,
            source: Box::new(source),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
