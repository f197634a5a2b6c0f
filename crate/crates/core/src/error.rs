use thiserror::Error;

use crate::state::ModeId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate mode label `{0}`")]
    DuplicateMode(ModeId),

    #[error("unknown mode `{0}`")]
    UnknownMode(ModeId),

    #[error("mode `{0}` used twice in a two-qubit operation")]
    ModesNotDistinct(ModeId),

    #[error("expected a {expected}x{expected} gate matrix, got {got}x{got}")]
    GateDimension { expected: usize, got: usize },

    #[error("gate dimensions differ: {a}x{a} vs {b}x{b}")]
    DimensionMismatch { a: usize, b: usize },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("state is not normalized (squared norm {norm_sq})")]
    NotNormalized { norm_sq: f64 },

    #[error("states are defined on different mode sets")]
    ModeSetMismatch,

    #[error("a state needs at least one mode")]
    EmptyBasis,

    #[error("{0} qubits exceed the dense-simulation limit")]
    TooManyQubits(usize),

    #[error("mode count {0} is odd; expected an even number of modes")]
    OddModeCount(usize),

    #[error("invalid expansion layout: {0}")]
    InvalidLayout(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("resource bound exceeded: {0}")]
    ResourceBound(String),

    #[error("invalid state data: {0}")]
    InvalidState(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
