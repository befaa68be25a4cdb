use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("context mismatch: {0}")]
    Context(String),
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{0}`")]
    UnknownIdent(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parity error: {0}")]
    Parity(String),
    #[error("index {index} out of range 1..={max}")]
    Index { index: usize, max: usize },
    #[error("jet is not invertible (linear coefficient is zero)")]
    NonInvertibleJet,
    #[error("pole of the gamma function at {0}")]
    Pole(f64),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("degree bound exceeded: {0}")]
    Degree(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("quadrature: {0}")]
    Quadrature(String),
    #[error("refused: {0}")]
    Refused(String),
}

pub type Result<T> = std::result::Result<T, Error>;
