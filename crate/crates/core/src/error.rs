use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("invalid transition matrix: {axis} {index} has no allowed transition")]
    InvalidMatrix { axis: &'static str, index: usize },

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("point {point} does not belong to a {system} system")]
    TypeMismatch { system: &'static str, point: String },

    #[error("orbit entry {n} coincides with entry {j}; no separating function exists")]
    SeparationImpossible { n: usize, j: usize },

    #[error("point {0} is not periodic")]
    NotPeriodic(String),

    #[error("coefficient depth {depth} exceeds pushdown power {m} + 1")]
    DepthTooLarge { depth: usize, m: usize },

    #[error("element is not semicrossed: {0}")]
    NotSemicrossed(String),

    #[error("lambda must have unit modulus, got |lambda| = {0}")]
    BadLambda(f64),

    #[error("window half-width {window} is smaller than the band width {needed}")]
    WindowTooSmall { window: usize, needed: usize },

    #[error("expected an element in relation-2 form")]
    WrongForm,

    #[error("orbit entries {i} and {j} coincide within the window")]
    OrbitCollision { i: usize, j: usize },

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("bad input: {0}")]
    BadInput(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
