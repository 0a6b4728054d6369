use std::fmt;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Operand dimensions disagree (measure vs hyperplane, sets vs ambient space, ...).
    DimensionMismatch { expected: usize, got: usize },
    /// A parameter is out of its documented range.
    InvalidParameter(String),
    /// The combination of inputs is valid individually but unsupported together
    /// (e.g. set count != ambient dimension in a separability check).
    UnsupportedConfiguration(String),
    /// A function evaluation produced a non-finite value at the given point.
    NonFiniteEvaluation { point: Vec<f64>, component: usize },
    /// A closed curve degenerated to a point; its turning number is undefined.
    DegenerateCurve,
    /// A conditional measure was requested on a side of zero mass.
    ZeroMassSide,
    /// No built-in scenario under this name.
    UnknownScenario(String),
    /// A container set fails the mass condition required of auxiliary functions.
    ContainerCondition { required: f64, observed: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::UnsupportedConfiguration(msg) => write!(f, "unsupported configuration: {msg}"),
            Error::NonFiniteEvaluation { point, component } => write!(
                f,
                "non-finite value in component {component} at {point:?}"
            ),
            Error::DegenerateCurve => write!(f, "curve is degenerate (all samples coincide)"),
            Error::ZeroMassSide => write!(f, "cannot condition on a half-space of zero mass"),
            Error::UnknownScenario(name) => write!(f, "unknown scenario: {name}"),
            Error::ContainerCondition { required, observed } => write!(
                f,
                "container mass condition violated: need mu(S) >= {required}, got {observed}"
            ),
        }
    }
}

impl std::error::Error for Error {}
