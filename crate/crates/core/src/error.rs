use thiserror::Error;

/// Hard violations of a [`SystemConfig`](crate::SystemConfig) or sweep description.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{field} must be at least 1")]
    NotPositive { field: &'static str },
    #[error("{field} must be finite, got {value}")]
    NotFinite { field: &'static str, value: f64 },
    #[error("zero-force beamforming requires M >= K (M = {elements}, K = {users})")]
    TooFewElements { elements: usize, users: usize },
    #[error("an enabled blocker needs K >= 2 (K = {users})")]
    BlockerNeedsTwoUsers { users: usize },
    #[error("angle {angle_deg} deg is outside (-90, 90)")]
    AngleOutOfRange { angle_deg: f64 },
    #[error("ADC resolution of {bits} bits exceeds the supported 52")]
    TooManyBits { bits: u32 },
    #[error("invalid sweep: {0}")]
    Sweep(String),
    #[error("cannot parse config: {0}")]
    Parse(String),
}

/// Errors raised by the signal chain and measurement blocks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("length mismatch: {left} vs {right} samples")]
    LengthMismatch { left: usize, right: usize },
    #[error("signal has zero power")]
    ZeroPower,
    #[error("empty signal block")]
    EmptyBlock,
    #[error("bit count {0} is not a positive multiple of 4")]
    BitCount(usize),
    #[error("Gram matrix is ill-conditioned (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },
    #[error("lag window +/-{max_lag} too wide for {len} samples")]
    LagWindow { max_lag: usize, len: usize },
    #[error("SIR grid must be strictly ascending")]
    NonMonotonicGrid,
    #[error("an interferer requires K >= 2")]
    InterfererNeedsTwoUsers,
}

/// Errors surfaced by the sweep harness and its file formats.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("unknown preset {name:?}; available: {}", available.join(", "))]
    UnknownPreset {
        name: String,
        available: Vec<&'static str>,
    },
    #[error("result file: {0}")]
    Format(String),
    #[error("plot: {0}")]
    Plot(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    /// True for failures caused by the caller's input rather than the environment.
    pub fn is_config(&self) -> bool {
        matches!(self, HarnessError::Config(_) | HarnessError::UnknownPreset { .. })
    }
}
