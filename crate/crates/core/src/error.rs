use alloc::string::String;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Structural defects of a dependency tree.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("sentence has no tokens")]
    Empty,
    #[error("token ids are not consecutive: expected {expected}, found {found}")]
    NonConsecutiveIds { expected: usize, found: usize },
    #[error("token {id} has an empty {field}")]
    EmptyField { id: usize, field: &'static str },
    #[error("token {id} is its own head")]
    SelfLoop { id: usize },
    #[error("token {id} points to missing head {head}")]
    DanglingHead { id: usize, head: usize },
    #[error("no root token (head = 0)")]
    NoRoot,
    #[error("multiple root tokens: {first} and {second}")]
    MultipleRoots { first: usize, second: usize },
    #[error("head relation is cyclic at token {id}")]
    Cycle { id: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid sentence {sent_id}: {source}")]
    InvalidTree { sent_id: String, source: TreeError },
    #[error("duplicate sentence id {0}")]
    DuplicateSentence(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("sentence {sent_id} exceeds the catena cap of {limit}")]
    CatenaOverflow { sent_id: String, limit: usize },
    #[error("empty stream")]
    EmptyStream,
    #[error("no patterns survive threshold (min_freq = {min_freq})")]
    NoPatternsSurvive { min_freq: u64 },
    #[error("unknown pattern {0}")]
    UnknownPattern(String),
    #[error("pattern {0} has a zero meaning vector")]
    ZeroVector(String),
    #[error("malformed pattern: {0}")]
    MalformedPattern(String),

    #[error("need ≥ 2 checkpoints, got {0}")]
    TooFewCheckpoints(usize),
    #[error("checkpoints were built with different extraction configs")]
    MixedConfigs,
    #[error("no chain survives at both endpoint checkpoints")]
    NoChains,
    #[error("cannot split {rows} rows into {bins} bins")]
    TooFewRows { rows: usize, bins: usize },
    #[error("empty shift list")]
    NoShifts,

    #[error("Kruskal-Wallis needs at least 2 groups, got {0}")]
    TooFewGroups(usize),
    #[error("group {0} is empty")]
    EmptyGroup(usize),
    #[error("Kruskal-Wallis needs at least 3 observations, got {0}")]
    TooFewObservations(usize),
    #[error("observation {0} is not finite")]
    NonFinite(f64),
    #[error("zero variance, H undefined")]
    ZeroVariance,

    #[error("need at least 2 speakers, got {0}")]
    TooFewSpeakers(usize),
    #[error("duplicate speaker id {0}")]
    DuplicateSpeaker(String),
    #[error("unknown speaker {0}")]
    UnknownSpeaker(String),
    #[error("speaker {0} has no output checkpoints")]
    NoOutput(String),
    #[error("threshold {p} outside 1..={speakers}")]
    ThresholdOutOfRange { p: usize, speakers: usize },
    #[error("restricted universe is empty")]
    EmptyUniverse,
    #[error("speaker {0} has an empty output stream")]
    EmptyOutput(String),
    #[error("speakers {0} and {1} share no activated pattern on the sentence")]
    NoSharedActivation(String, String),
    #[error("a speaker cannot be compared with itself")]
    SameSpeaker,

    #[error("invalid grammar template: {0}")]
    InvalidTemplate(String),
    #[error("learner has not observed any tree")]
    Untrained,
}
