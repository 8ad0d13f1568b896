use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero in Q(q)")]
    DivisionByZero,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("word length {len} exceeds the height bound {bound}")]
    HeightBound { len: usize, bound: usize },
    #[error("degree {degree} exceeds the degree bound {bound}")]
    DegreeBound { degree: usize, bound: usize },
    #[error("orbit dimension exceeded the cap {cap}")]
    CapExceeded { cap: usize },
    #[error("element is not in the negative Borel subalgebra")]
    NotInBorel,
    #[error("element does not lie in the given subspace")]
    NotInSpan,
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
