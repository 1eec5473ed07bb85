use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid problem instance: {0}")]
    InvalidInstance(String),

    #[error("threshold undefined at s=0: {0}")]
    ThresholdUndefined(&'static str),

    #[error("b below admissible floor (b>0 bound): b = {b}, floor = {floor}")]
    BelowAdmissibleFloor { b: f64, floor: f64 },

    #[error("degenerate 𝒬 (m+s-q+1 = {0})")]
    DegenerateQ(f64),

    #[error("no estimate available for {0}")]
    NoEstimate(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid grid field: {0}")]
    InvalidGrid(String),

    #[error("field not smooth enough at spacing h = {0}")]
    FieldNotSmooth(f64),

    #[error("test field violates |∇v|>0 ({excluded} of {total} nodes excluded)")]
    DegenerateGradient { excluded: usize, total: usize },

    #[error("invalid radial problem: {0}")]
    InvalidProblem(String),

    #[error("Newton stalled: {0}")]
    NewtonStalled(String),

    #[error("Jacobian singular at regularization floor (row {0})")]
    SingularJacobian(usize),

    #[error("window underpopulated: {found} points in window, need at least {needed}")]
    WindowUnderpopulated { found: usize, needed: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
