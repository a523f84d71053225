use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the toolkit reports. Variants carry enough context to be
/// rendered as a structured error by the command-line front end.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("values from different quadratic fields: sqrt({left}) and sqrt({right})")]
    DiscMismatch { left: u64, right: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("discriminant {0} must be 0 or a square-free integer >= 2")]
    BadDiscriminant(u64),
    #[error("cannot parse number {input:?}: {reason}")]
    NumberParse { input: String, reason: String },

    #[error("sphere radius must be nonzero")]
    ZeroRadius,
    #[error("plane normal is not a unit vector")]
    NonUnitNormal,
    #[error("wall does not satisfy Q(v) = -1")]
    InvalidWall,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("line {line}: {reason}")]
    DiagramParse { line: usize, reason: String },
    #[error("line {line}: multiplicity {m} is not an angle edge (need m >= 3)")]
    BadMultiplicity { line: usize, m: u32 },
    #[error("line {line}: duplicate edge {i}-{j}")]
    DuplicateEdge { line: usize, i: usize, j: usize },
    #[error("cos(pi/{m}) is not representable in the working field")]
    UnrepresentableAngle { m: u32 },
    #[error("entry ({i}, {j}) = {value} is not 0, 1, > 1 or cos(pi/m)")]
    UnclassifiableEntry { i: usize, j: usize, value: String },
    #[error("invalid Gram matrix: {0}")]
    InvalidGram(String),

    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("{count} walls exceeds the enumeration cap of {cap}")]
    TooManyWalls { count: usize, cap: usize },

    #[error("Gram matrix is singular")]
    SingularGram,
    #[error("cluster matrix is not square and invertible")]
    SingularCluster,
    #[error("matrix has unspecified (placeholder) entries")]
    Placeholder,

    #[error("invalid wall system: {0}")]
    InvalidSystem(String),
    #[error("orbit frontier exceeded the cap of {cap} spheres")]
    FrontierOverflow { cap: usize },

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("gauge cannot be fixed: {0}")]
    GaugeDeficient(String),
    #[error("no algebraic candidate near {x}")]
    NoCandidate { x: f64 },
    #[error("ambiguous algebraic guess near {x}: {candidates:?}")]
    Ambiguous { x: f64, candidates: Vec<String> },

    #[error("bends-group input is not integral: {0}")]
    NonIntegralInput(String),
    #[error("rendering supports only planar packings, got dimension {0}")]
    UnsupportedDimension(usize),

    #[error("format error: {0}")]
    Format(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable name, used in JSON error reports and the C ABI.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DiscMismatch { .. } => "DiscMismatch",
            Error::DivisionByZero => "DivisionByZero",
            Error::BadDiscriminant(_) => "BadDiscriminant",
            Error::NumberParse { .. } => "NumberParse",
            Error::ZeroRadius => "ZeroRadius",
            Error::NonUnitNormal => "NonUnitNormal",
            Error::InvalidWall => "InvalidWall",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::DiagramParse { .. } => "ParseError",
            Error::BadMultiplicity { .. } => "BadMultiplicity",
            Error::DuplicateEdge { .. } => "DuplicateEdge",
            Error::UnrepresentableAngle { .. } => "UnrepresentableAngle",
            Error::UnclassifiableEntry { .. } => "UnclassifiableEntry",
            Error::InvalidGram(_) => "InvalidGram",
            Error::InvalidDecomposition(_) => "InvalidDecomposition",
            Error::TooManyWalls { .. } => "TooManyWalls",
            Error::SingularGram => "SingularGram",
            Error::SingularCluster => "SingularCluster",
            Error::Placeholder => "Placeholder",
            Error::InvalidSystem(_) => "InvalidSystem",
            Error::FrontierOverflow { .. } => "FrontierOverflow",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::GaugeDeficient(_) => "GaugeDeficient",
            Error::NoCandidate { .. } => "NoCandidate",
            Error::Ambiguous { .. } => "Ambiguous",
            Error::NonIntegralInput(_) => "NonIntegralInput",
            Error::UnsupportedDimension(_) => "UnsupportedDimension",
            Error::Format(_) => "FormatError",
            Error::Io(_) => "IoError",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
