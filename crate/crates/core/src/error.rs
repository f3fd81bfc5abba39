use thiserror::Error;

/// Errors raised by the library.
///
/// Structural problems (bad identifiers, wrong shapes) are errors. Axiom or
/// tolerance failures on well-formed input are usually reported through the
/// report types instead, except where an operation cannot proceed without them.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: unknown identifier `{id}`")]
    UnknownIdentifier { path: String, id: String },

    #[error("{path}: duplicate identifier `{id}`")]
    DuplicateIdentifier { path: String, id: String },

    #[error("{path}: {message}")]
    Schema { path: String, message: String },

    #[error("unknown base point `{0}`")]
    UnknownBasePoint(String),

    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),

    #[error("arrows `{first}` and `{second}` are not composable: r({second}) = {range_of_second} but s({first}) = {source_of_first}")]
    NotComposable {
        first: String,
        second: String,
        range_of_second: String,
        source_of_first: String,
    },

    #[error("groupoid axioms violated: {0}")]
    AxiomViolation(String),

    #[error("not a group: {axiom} ({detail})")]
    InvalidGroup { axiom: String, detail: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what}: expected shape {expected:?}, found {found:?}")]
    ShapeMismatch {
        what: String,
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("operands are defined over different groupoids")]
    GroupoidMismatch,

    #[error("invalid Haar system: {0}")]
    InvalidHaar(String),

    #[error("matrix is not Hermitian: entry ({row}, {col}) deviates by {deviation:e}")]
    NotHermitian {
        row: String,
        col: String,
        deviation: f64,
    },

    #[error("kernel is not positive definite: minimum eigenvalue {min_eigenvalue:e} below {threshold:e}")]
    NotPositiveDefinite { min_eigenvalue: f64, threshold: f64 },

    #[error("invariance violated at ({chi}, {gamma}): deviation {deviation:e}")]
    InvarianceViolation {
        chi: String,
        gamma: String,
        deviation: f64,
    },

    #[error("character map rejected ({reason}) at {witness:?}")]
    CharacterRejected {
        reason: String,
        witness: Vec<String>,
    },

    #[error("representation is not well defined on arrow `{arrow}`: residual {residual:e} at generator `{witness}`")]
    NotWellDefined {
        arrow: String,
        witness: String,
        residual: f64,
    },

    #[error("representation invalid: {0}")]
    InvalidRepresentation(String),

    #[error("kernel distance radicand {radicand:e} is negative at ({x}, {y})")]
    NegativeRadicand { x: String, y: String, radicand: f64 },

    #[error("tsp: {0}")]
    Tsp(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
