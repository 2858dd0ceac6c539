use alloc::string::String;

/// Errors raised by the core pipeline.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("size error: {0}")]
    Size(String),
    #[error("out of bounds: {0}")]
    Bounds(String),
    #[error("length mismatch: {left} vs {right}")]
    Length { left: usize, right: usize },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("shape error: model expects {expected} features, got {actual}")]
    Shape { expected: usize, actual: usize },
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::Error::$kind(alloc::format!($($arg)*)))
    };
}
pub(crate) use bail;
