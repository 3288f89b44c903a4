use thiserror::Error;

use crate::hilbert::MarkerLabel;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("state has zero norm")]
    DegenerateState,

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("label {0} collides with an existing branch")]
    LabelCollision(MarkerLabel),

    #[error("states are written in different marker bases")]
    BasisMismatch,

    #[error("illegal event order: {0}")]
    ProtocolOrder(String),

    #[error("observable {observable} is not defined on marker label {label}")]
    IncompatibleObservable {
        observable: &'static str,
        label: MarkerLabel,
    },

    #[error("conditioning outcome {0} has zero probability")]
    EmptyEnsemble(i8),
}

pub type Result<T> = std::result::Result<T, Error>;
