// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("resource limit: {0}")]
    Resource(String),
    /// An identity failed; the message names it.
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Resource(_) => EXIT_RESOURCE,
            CliError::Verification(_) | CliError::Io(_) => EXIT_VERIFICATION,
        }
    }
}

impl From<fermicomm::Error> for CliError {
    fn from(e: fermicomm::Error) -> Self {
        match e {
            fermicomm::Error::Domain(m) => CliError::Usage(m),
            fermicomm::Error::Resource(m) => CliError::Resource(m),
            other => CliError::Verification(other.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_errors_map_to_exit_codes() {
        let code = |e: fermicomm::Error| CliError::from(e).exit_code();
        assert_eq!(code(fermicomm::Error::Domain("x".into())), EXIT_USAGE);
        assert_eq!(code(fermicomm::Error::Resource("x".into())), EXIT_RESOURCE);
        assert_eq!(code(fermicomm::Error::Verification("x".into())), EXIT_VERIFICATION);
        assert_eq!(code(fermicomm::Error::Internal("x".into())), EXIT_VERIFICATION);
    }
}
