use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid density model: {0}")]
    Model(String),
    #[error("{0}")]
    InvalidArgument(String),
    #[error("{points} points exceed the exhaustive-search limit of {limit}; use random editing for larger sets")]
    TooManyPoints { points: usize, limit: usize },
    #[error("model config: {0}")]
    Config(#[from] toml::de::Error),
    #[error(transparent)]
    Core(#[from] gmselect_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
