use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Grid or image dimensions incompatible with the requested operation.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// Malformed or out-of-range input parameters.
    #[error("invalid input: {0}")]
    Input(String),

    /// The payload cannot be carried even once by any subband.
    #[error("capacity error: payload of {payload} bits exceeds the largest subband capacity of {capacity} blocks")]
    Capacity { payload: usize, capacity: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub(crate) fn dimension(msg: impl Into<String>) -> Error {
    Error::Dimension(msg.into())
}

pub(crate) fn input(msg: impl Into<String>) -> Error {
    Error::Input(msg.into())
}
