use thiserror::Error;

/// Errors raised by the library.
///
/// The CLI maps these onto exit codes: [`Error::Resource`] is a cap error,
/// everything else is a domain error.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("resource cap `{cap}` exceeded: limit {limit}, required {required}")]
    Resource {
        cap: &'static str,
        limit: u128,
        required: u128,
    },

    #[error("centroid undefined: {0}")]
    UndefinedCentroid(String),

    #[error("a vertex lies on the cut plane x_{axis} = {value}; perturbation required")]
    PerturbationRequired { axis: usize, value: String },

    #[error("vertex count exceeds search range [1, {n_max}]")]
    SearchRange { n_max: u64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("construction undefined: {0}")]
    ConstructionUndefined(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }

    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
