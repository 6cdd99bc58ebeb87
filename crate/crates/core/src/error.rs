use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A precondition on the inputs was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// Circulant embedding produced an eigenvalue below the clipping threshold.
    #[error("circulant embedding failed: eigenvalue {eigenvalue:e} at index {index} (threshold {threshold:e})")]
    Embedding {
        index: usize,
        eigenvalue: f64,
        threshold: f64,
    },

    /// Cholesky factorization hit a non-positive pivot.
    #[error("cholesky factorization failed at pivot {pivot} (value {value:e})")]
    Factorization { pivot: usize, value: f64 },

    /// Picard iteration stopped contracting.
    #[error("picard iteration diverged after {iterations} iterations (last ratios {last_ratios:?})")]
    Divergence {
        iterations: usize,
        last_ratios: Vec<f64>,
    },

    /// A numerical certification found a violated inequality.
    #[error("certification failed: {check}: {detail}")]
    Certification { check: String, detail: String },

    /// No weight on the doubling grid satisfied the contraction condition.
    #[error("no rho on the doubling grid up to 2^64 gives a contraction (product at 2^64: {product:e})")]
    RhoSearch { product: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

impl Error {
    /// Exit-code class used by the command line front end:
    /// 1 validation, 2 certification, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) => 1,
            Error::Certification { .. } => 2,
            Error::Embedding { .. }
            | Error::Factorization { .. }
            | Error::Divergence { .. }
            | Error::RhoSearch { .. } => 3,
        }
    }
}
