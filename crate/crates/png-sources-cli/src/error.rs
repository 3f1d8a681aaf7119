use std::fmt;

/// CLI failure with its exit code: 2 for configuration, 3 for numerics,
/// 1 for I/O.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<png_sources::Error> for CliError {
    fn from(e: png_sources::Error) -> Self {
        use png_sources::Error as E;
        match e {
            E::Config(m) => CliError::Config(m),
            E::Numeric(m) => CliError::Numeric(m),
            E::Domain(_) | E::Parameter(_) | E::Unsupported(_) => CliError::Config(e.to_string()),
            E::Instability(_) => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
