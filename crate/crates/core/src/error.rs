use thiserror::Error;

/// Errors raised by constructions and checks.
///
/// Rejections carry the offending quantity so a report (or a caller fixing
/// its configuration) can point at the exact violation.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("parameter outside chart domain: coordinate {axis} = {value} not in [{lo}, {hi}]")]
    DomainViolation {
        axis: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("non-finite value in {context}")]
    NonFinite { context: String },

    #[error("ordering violated: {requirement} (got {values:?})")]
    OrderingViolation {
        requirement: String,
        values: Vec<f64>,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("derivative is boundary-singular at parameter ({0}, {1})")]
    BoundarySingular(f64, f64),

    #[error("series weight {index} violates the recorded tail bound: {detail}")]
    TailBound { index: usize, detail: String },

    #[error("flattening constants rejected: {detail} (r = {r}, k = {k}, mu = {mu})")]
    FlatteningConstants {
        detail: String,
        r: f64,
        k: f64,
        mu: f64,
    },

    #[error("tube hypothesis violated: {hypothesis} at witness ({w0}, {w1})")]
    TubeHypothesis {
        hypothesis: String,
        w0: f64,
        w1: f64,
    },

    #[error("splice scale too small: need expansion >= {required}, got {got}")]
    SpliceScale { required: f64, got: f64 },

    #[error("excised discs invalid: {0}")]
    ExcisionInvalid(String),

    #[error("degenerate tangent solve: {0}")]
    DegenerateTangent(String),

    #[error("no admissible flattening gap: {0}")]
    NoAdmissibleGap(String),

    #[error("grid incompatible: {0}")]
    GridIncompatible(String),

    #[error("sample rejected: {0}")]
    SampleRejected(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CoreError>;
