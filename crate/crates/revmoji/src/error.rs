//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by loading resources, scoring, training, or reporting.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// A resource or dataset file failed to parse. Lines are 1-based.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    /// An emoticon row targets a shortcode missing from the shortcode table.
    #[error("emoticon `{emoticon}` targets unknown shortcode `{shortcode}`")]
    DanglingEmoticon { emoticon: String, shortcode: String },

    /// A mapped glyph is not a single self-contained grapheme cluster.
    #[error("shortcode `{shortcode}` maps to `{glyph}`, which is not a single self-contained emoji cluster")]
    InvalidGlyph { shortcode: String, glyph: String },

    #[error("series length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("training data must contain both classes")]
    SingleClass,

    #[error("non-finite value at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },

    #[error("class {label} has {count} members, fewer than {folds} folds")]
    ClassTooSmall {
        label: u8,
        count: usize,
        folds: usize,
    },

    #[error("need at least {need} rows, got {got}")]
    TooFewRows { need: usize, got: usize },

    #[error("duplicate comment id `{id}` at row {row}")]
    DuplicateId { id: String, row: usize },

    #[error("annotation sets do not cover the same comments: {0}")]
    AnnotationMismatch(String),

    #[error("agreement undefined: expected agreement equals 1")]
    DegenerateAgreement,

    #[error("delta requires matching dataset tags: `{with_tag}` vs `{without_tag}`")]
    MismatchedTags {
        with_tag: String,
        without_tag: String,
    },

    #[error("invalid regular expression `{pattern}`: {source}")]
    BadPattern {
        pattern: String,
        #[source]
        source: regex::Error,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("{0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub(crate) fn parse(path: &std::path::Path, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.display().to_string(),
            line,
            message: message.into(),
        }
    }
}
