use thiserror::Error;

/// Errors raised by tree materialization and the operator computations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("level {level} is outside the materialized depth {depth}")]
    OutOfDepth { level: usize, depth: usize },

    #[error("vertex ({level}, {index}) does not exist: level {level} has {width} vertices")]
    NoSuchVertex { level: usize, index: String, width: String },

    #[error("result would need level {needed} but the tree is materialized to depth {depth}")]
    DepthExceeded { needed: usize, depth: usize },

    #[error("depth {depth} is too small: {requirement}")]
    DepthTooSmall { depth: usize, requirement: String },

    #[error("resource limit: {what} would exceed the cap of {cap}")]
    ResourceLimit { what: String, cap: u64 },

    #[error("degree rule produced a leaf at ({level}, {index}) although the tree spec claims the tree is leafless")]
    LeaflessContradiction { level: usize, index: String },

    #[error("degree rule returned {got} vertices for level {level}, expected {expected}")]
    RuleWidthMismatch {
        level: usize,
        expected: String,
        got: String,
    },

    #[error("vertex ({level}, {index}) has no {generations}-children")]
    LeafEncountered {
        level: usize,
        index: String,
        generations: usize,
    },

    #[error("exponent p = {p} is not usable here: {reason}")]
    InvalidExponent { p: String, reason: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown gallery tree `{0}`")]
    UnknownGallery(String),

    #[error("g(root) must be nonzero for the root-evaluation bound")]
    ZeroAtRoot,

    #[error("{0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Short machine-readable tag used in structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::OutOfDepth { .. } => "out_of_depth",
            Error::NoSuchVertex { .. } => "no_such_vertex",
            Error::DepthExceeded { .. } => "depth_exceeded",
            Error::DepthTooSmall { .. } => "depth_too_small",
            Error::ResourceLimit { .. } => "resource_limit",
            Error::LeaflessContradiction { .. } => "leafless_contradiction",
            Error::RuleWidthMismatch { .. } => "rule_width_mismatch",
            Error::LeafEncountered { .. } => "leaf_encountered",
            Error::InvalidExponent { .. } => "invalid_exponent",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::UnknownGallery(_) => "unknown_gallery",
            Error::ZeroAtRoot => "zero_at_root",
            Error::Format(_) => "format",
        }
    }
}
