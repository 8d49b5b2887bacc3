use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Partition parameters outside their valid range.
    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    /// Vector or matrix sizes do not agree.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A parameter is outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Least-squares system is rank deficient within a cell.
    #[error("rank deficiency in cell {cell}: {detail}")]
    RankDeficient { cell: usize, detail: String },

    /// Power iteration did not reach the requested tolerance.
    #[error("power iteration did not converge after {iterations} iterations (last Rayleigh quotient {last_estimate})")]
    PowerIterationDiverged { iterations: usize, last_estimate: f64 },

    /// A model collection was empty where at least one model is required.
    #[error("empty model collection")]
    EmptyCollection,

    /// The selected-dimension path never jumps, so the slope heuristic is
    /// undefined.
    #[error("no dimension jump; collection too poor")]
    NoDimensionJump,

    /// Input series too short or otherwise unusable for the operation.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Whittle estimation failed (degenerate periodogram or search failure).
    #[error("whittle estimation failed: {0}")]
    Whittle(String),

    /// A pipeline stage failed; wraps the underlying error with the stage name.
    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    /// Simulation request exceeds the configured size cap.
    #[error("simulation size {n} exceeds cap {cap} for the dense fallback")]
    SimulationTooLarge { n: usize, cap: usize },

    /// Configuration file or option error.
    #[error("config error: {0}")]
    Config(String),

    /// Underlying I/O failure, annotated with the path involved.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Wrap an error with the pipeline stage that produced it.
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage { stage, source: Box::new(self) }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
