//! Library side of the `fracdiff` command-line tool: configuration,
//! CSV output, the comparison pipeline and one function per subcommand.

use std::path::Path;

pub mod commands;
pub mod config;
pub mod output;
pub mod report;

pub use config::{parse_config, ConfigError, RunConfig};
pub use report::{compare_micro_macro, mass_report, ComparisonReport, MassReport};

/// Process exit status for configuration and usage errors.
pub const EXIT_CONFIG: u8 = 2;
/// Process exit status for numerical failures.
pub const EXIT_NUMERICAL: u8 = 3;
/// Process exit status for I/O failures.
pub const EXIT_IO: u8 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("numerical failure: {0}")]
    Numerical(fracdiff_core::Error),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

impl From<fracdiff_core::Error> for CliError {
    fn from(e: fracdiff_core::Error) -> Self {
        use fracdiff_core::Error as E;
        match e {
            // parameters that slipped past validation are still the user's
            E::Domain { .. } | E::Input(_) => CliError::Usage(e.to_string()),
            E::NoConvergence { .. } | E::Instability { .. } | E::NonFinite { .. } => CliError::Numerical(e),
        }
    }
}
