use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("bit count {len} is not a multiple of {bits_per_symbol} bits per symbol")]
    BitLength { len: usize, bits_per_symbol: usize },

    #[error("expected {expected} samples, got {actual}")]
    BlockLength { expected: usize, actual: usize },

    #[error("coded bit stream has odd length {0}")]
    OddCodedLength(usize),

    #[error("payload must contain at least one byte")]
    EmptyPayload,

    #[error("oversampling factor {0} is not a power of two in 1..=64")]
    BadOversampling(usize),

    #[error("multipath tap delay {delay} exceeds the cyclic-prefix budget of {budget} oversamples")]
    TapDelayExceedsCp { delay: usize, budget: usize },

    #[error("multipath profile must be non-empty and start at delay 0")]
    BadTapProfile,

    #[error("clock switch latency of {latency} base samples exceeds the {available} samples left in the short training field")]
    SwitchLatency { latency: usize, available: usize },

    #[error("clock switch requires a detected packet")]
    NotDetected,

    #[error("timing search window is empty")]
    EmptySearchWindow,

    #[error("fine frequency estimation needs at least two copies")]
    FineCfoNotApplicable,

    #[error("stream too short: need {needed} samples, have {available}")]
    StreamTooShort { needed: usize, available: usize },

    #[error("noise map needs at least {needed} samples per subcarrier, got {available}")]
    InsufficientSamples { needed: usize, available: usize },

    #[error("packet not detected")]
    SyncFailure,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed sample file: {0}")]
    MalformedFile(String),

    #[error("csv schema mismatch: {0}")]
    Schema(String),

    #[error("plot rendering failed: {0}")]
    Plot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
