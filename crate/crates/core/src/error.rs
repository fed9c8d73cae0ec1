use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The result is not representable as a finite double.
    #[error("range error: {0}")]
    Range(String),

    /// The counterterm flow is singular at this cutoff: the zero-energy
    /// exterior solution has a node exactly at `R`.
    #[error("flow pole at R/r0 = {ratio} (critical R/r0 = {critical_ratio})")]
    FlowPole { ratio: f64, critical_ratio: f64 },

    /// More than one bound state was found where at most one is expected.
    #[error("found {} bound-state roots where at most one is expected: {roots:?}", roots.len())]
    Multiplicity { roots: Vec<f64> },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("usage error: {0}")]
    Usage(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
