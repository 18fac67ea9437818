use crate::compose::ParseError;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("image dimensions must be at least 1x1, got {height}x{width}")]
    EmptyImage { height: usize, width: usize },

    #[error("unsupported channel count {0} (expected 1 or 3)")]
    Channels(usize),

    #[error("sample buffer holds {actual} values, expected {expected}")]
    BufferLength { expected: usize, actual: usize },

    #[error("non-finite sample at index {0}")]
    NonFinite(usize),

    #[error("shape mismatch: {left:?} vs {right:?} (height, width, channels)")]
    ShapeMismatch {
        left: (usize, usize, usize),
        right: (usize, usize, usize),
    },

    #[error("atmosphere must be strictly positive")]
    NonPositiveAtmosphere,

    #[error("atmosphere contains a NaN or infinite value")]
    NonFiniteAtmosphere,

    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),

    #[error(transparent)]
    Parse(#[from] ParseError),
}
