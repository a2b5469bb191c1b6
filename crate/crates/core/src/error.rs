use thiserror::Error;

/// Errors raised by grid operations, kernel lookup and the engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid dimensions must be at least 1x1 (got {width}x{height})")]
    EmptyGrid { width: usize, height: usize },

    #[error("levels must be in 2..=65536 (got {0})")]
    InvalidLevels(u32),

    #[error("cell value {value} outside [0, {max}]")]
    LevelOutOfRange { value: u32, max: u32 },

    #[error("expected {expected} cells, got {actual}")]
    CellCount { expected: usize, actual: usize },

    #[error("coordinate ({row}, {col}) outside {width}x{height} grid")]
    OutOfBounds {
        row: usize,
        col: usize,
        width: usize,
        height: usize,
    },

    #[error("grid mismatch: {left} vs {right}")]
    Mismatch { left: String, right: String },

    #[error("unknown kernel `{name}`; known kernels: {}", known.join(", "))]
    UnknownKernel { name: String, known: Vec<String> },

    #[error("kernel `{0}` is guarded and needs a reference grid")]
    MissingReference(String),

    #[error("kernel `{0}` is unguarded and takes no reference grid")]
    UnexpectedReference(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid kernel `{name}`: {reason}")]
    InvalidKernel { name: String, reason: String },

    #[error("component id {id} out of range 1..={count}")]
    ComponentOutOfRange { id: u32, count: u32 },

    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error("PGM: {0}")]
    Pgm(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by how the library was called rather than by the data.
    pub fn is_usage(&self) -> bool {
        !matches!(self, Error::Pgm(_) | Error::Io(_) | Error::CheckFailed(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
