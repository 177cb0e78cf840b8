//! Error taxonomy of the CLI: input problems exit with 2, internal
//! failures with 1.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad inputs: unreadable or malformed files, invalid configuration,
    /// unknown names. Exit code 2.
    #[error("{0}")]
    Input(String),
    /// Failures on our side of the contract (e.g. the output directory
    /// cannot be written). Exit code 1.
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 1,
        }
    }

    pub fn input(err: impl std::fmt::Display) -> Self {
        CliError::Input(err.to_string())
    }

    pub fn internal(err: impl std::fmt::Display) -> Self {
        CliError::Internal(err.to_string())
    }
}

impl From<propeval::data_model::DataError> for CliError {
    fn from(e: propeval::data_model::DataError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<propeval::config_io::ConfigError> for CliError {
    fn from(e: propeval::config_io::ConfigError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<propeval::metrics::MetricsError> for CliError {
    fn from(e: propeval::metrics::MetricsError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<propeval::synth::SynthError> for CliError {
    fn from(e: propeval::synth::SynthError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<propeval::proposers::ProposerError> for CliError {
    fn from(e: propeval::proposers::ProposerError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<propeval::diagnostics::DiagnosticsError> for CliError {
    fn from(e: propeval::diagnostics::DiagnosticsError) -> Self {
        CliError::Input(e.to_string())
    }
}
