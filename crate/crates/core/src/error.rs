use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("basis mismatch: {0} vs {1}")]
    BasisMismatch(String, String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("bound not certified: {0}")]
    BoundNotCertified(String),
    #[error("unsupported blow-down class {0}")]
    UnsupportedBlowdown(String),
    #[error("no exceptional divisor")]
    NoExceptionalDivisor,
    #[error("capacity too large: {0}")]
    CapacityTooLarge(String),
    #[error("edge not exceptional: self-intersection {0}")]
    EdgeNotExceptional(i64),
    #[error("index {index} out of range (size {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("infeasible blow-up: {0}")]
    Infeasible(String),
    #[error("section area nonpositive: {0}")]
    SectionAreaNonpositive(String),
    #[error("no -1 edge and not a model polygon")]
    NotAModel,
}
