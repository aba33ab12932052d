use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("rate must be non-negative, got {0}")]
    NegativeRate(f64),

    /// Both transmission opportunities fail with probability one, so the age
    /// grows without bound.
    #[error("user never delivers an update: first- and second-opportunity success probabilities are both zero")]
    NeverDelivers,

    #[error("user index {index} out of range for {users} users")]
    UserOutOfRange { index: usize, users: usize },

    #[error("time regression: event at {event} precedes last event at {last}")]
    TimeRegression { last: f64, event: f64 },

    #[error("delivery cannot raise the age: {before} -> {after}")]
    AgeIncrease { before: f64, after: f64 },

    #[error("zero-length accumulation window")]
    EmptyWindow,

    #[error("no deliveries recorded for user {0}")]
    NoDeliveries(usize),

    #[error("event log line {line}: {msg}")]
    EventLog { line: usize, msg: String },

    #[error("ratio {0} outside the open interval (0, 1)")]
    RatioOutOfRange(f64),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
