use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension must be 3 or 4, got {0}")]
    BadDimension(usize),
    #[error("resolution must be at least 8 points per axis, got {0}")]
    BadResolution(usize),
    #[error("axis {axis} out of range for a {dim}-dimensional chart")]
    BadAxis { axis: usize, dim: usize },
    #[error("sample count {got} matches neither the grid ({grid}) nor a loop ({loop_len})")]
    SampleCountMismatch {
        got: usize,
        grid: usize,
        loop_len: usize,
    },
    #[error("point is not a node of the {0}-per-axis grid")]
    OffGrid(usize),

    #[error("parse error at position {pos}: {message}")]
    Parse { pos: usize, message: String },
    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("variable x{var} used on a {dim}-dimensional chart")]
    VariableOutOfRange { var: usize, dim: usize },
    #[error("division by zero")]
    DivisionByZero,

    #[error("expected {expected} coefficient fields, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("metric signature violated: {0}")]
    SignatureViolation(String),
    #[error("metric density is degenerate")]
    DegenerateMetric,
    #[error("potential residual {0:e} exceeds tolerance")]
    ResidualTooLarge(f64),
    #[error("charge is not constant: {0}")]
    NonConstantCharge(String),
    #[error("trace vector field is not timelike (g(t,t) = {0:e})")]
    NotTimelike(f64),
    #[error("a reference covector is required on 4-dimensional charts")]
    MissingReferenceCovector,
    #[error("a reference covector applies only to 4-dimensional charts")]
    UnexpectedReferenceCovector,

    #[error("frame is degenerate (|det| = {0:e})")]
    DegenerateFrame(f64),
    #[error("frame transition is not in the expected group: {0}")]
    NotInGroup(String),
    #[error("lift verification failed (residual {0:e})")]
    LiftVerificationFailed(f64),
    #[error("sampling too coarse for sign continuation along axis {0}")]
    SamplingTooCoarse(usize),
    #[error("lift does not close up: {0}")]
    ClosureFailure(String),
    #[error("no global lift: monodromy {0:?}")]
    NoLift(Vec<i8>),

    #[error("gauge map is singular (|det R| = {0:e})")]
    SingularGauge(f64),
    #[error("volume form vanishes")]
    VanishingVolumeForm,
    #[error("one-form is not closed (max |curl| = {0:e})")]
    NotClosed(f64),
    #[error("periods {0:?} do not admit a single-valued phase")]
    NoSingleValuedPhase(Vec<f64>),
    #[error("group {group} requires a {expected}-dimensional chart, got {dim}")]
    GroupDimensionMismatch {
        group: String,
        expected: usize,
        dim: usize,
    },
    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),
    #[error("fields live on different grids")]
    GridMismatch,

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("unknown name `{0}`")]
    UnknownName(String),
}
