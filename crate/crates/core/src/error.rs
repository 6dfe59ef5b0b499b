// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the documented range or shapes do not match.
    #[error("domain error: {0}")]
    Domain(String),
    /// The request would exceed a configured size cap.
    #[error("resource limit: {0}")]
    Resource(String),
    /// A sampled group element sits too close to the logarithm branch cut;
    /// callers are expected to draw a fresh sample.
    #[error("branch cut: {0}")]
    BranchCut(String),
    /// A numerical identity did not hold within its tolerance.
    #[error("verification failed: {0}")]
    Verification(String),
    /// Two independent evaluations of the same quantity disagreed.
    #[error("internal consistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
