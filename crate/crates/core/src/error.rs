use thiserror::Error;

/// Errors for conic construction, digitization and verification.
#[derive(Debug, Error)]
pub enum Error {
    #[error("arithmetic overflow in exact integer evaluation")]
    Overflow,
    #[error("degenerate conic: determinant of the coefficient matrix is zero")]
    DegenerateConic,
    #[error("conic has no real points")]
    NoRealLocus,
    #[error("no curve remains after clipping to the frame")]
    EmptyAfterClipping,
    #[error("the center of a conic has no polar line")]
    CenterHasNoPolar,
    #[error("pole of the requested line is at infinity")]
    PoleAtInfinity,
    #[error("footpoint clamped to a segment endpoint")]
    ClampedFootpoint,
    #[error("no real arc available for distance measurement")]
    NoRealArc,
    #[error("segment span exceeds the exhaustive-search limit of {0} grid steps per axis")]
    SpanTooLarge(i64),
    #[error("step budget exceeded after {0} steps: digitization ran berserk")]
    StepBudgetExceeded(u64),
    #[error("requested arc not usable: {0}")]
    ArcNotFound(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("internal state integrity failure: incremental gradient diverged")]
    StateIntegrity,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
