use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("the set is empty")]
    EmptySet,
    #[error("point is not in the set")]
    PointNotInSet,
    #[error("point is not in the domain")]
    NotInDomain,
    #[error("point is not in the graph")]
    NotInGraph,
    #[error("negative scalar {0}")]
    NegativeScalar(String),
    #[error("optimal value function is not proper: {0}")]
    ImproperValue(String),
    #[error("malformed instance: {0}")]
    MalformedInstance(String),
    #[error("generator caps exceeded: {0}")]
    CapsExceeded(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
