use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid mesh parameters: {0}")]
    InvalidMeshParameters(String),

    #[error("degenerate cell {cell}: area {area:e}")]
    DegenerateCell { cell: usize, area: f64 },

    #[error("CFL condition violated: time step {delta:e} exceeds the stable bound {limit:e}")]
    CflViolation { delta: f64, limit: f64 },

    #[error("flux splitting is not monotone: {0}")]
    NonMonotoneSplit(String),

    #[error("field has {found} values, grid has {expected} cells")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid time interval [{t0}, {t1}]")]
    InvalidTimeInterval { t0: f64, t1: f64 },

    #[error("unsupported configuration: {0}")]
    Config(String),

    #[error("refinement row {row} (h = {h:e}): {source}")]
    Row {
        row: usize,
        h: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
