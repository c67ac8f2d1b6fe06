use thiserror::Error;

/// Errors produced by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("map is not self-adjoint (Choi matrix Hermiticity error {0:.3e})")]
    NotSelfAdjoint(f64),

    /// The Choi matrix has no positive part, i.e. `-phi` is completely
    /// positive and the split `c^-1 phi = Tr - phi_cp` does not exist.
    #[error("-phi is completely positive; split undefined")]
    NegativeOfCpMap,

    #[error("witness extension inapplicable: {}", .0.join("; "))]
    WitnessInapplicable(Vec<String>),

    #[error("unknown gallery map `{0}`")]
    UnknownGallery(String),
}

pub type Result<T> = std::result::Result<T, MapError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(MapError::InvalidInput(msg.into()))
}
