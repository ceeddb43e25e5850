use thiserror::Error;

pub type Result<T> = std::result::Result<T, NfError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NfError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two points that must be distinct coincide (zero propagation distance).
    #[error("singular geometry: {0}")]
    SingularGeometry(String),

    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    /// Estimation could not produce what was asked for; the message says why.
    #[error("diagnostic: {0}")]
    Diagnostic(String),

    #[error("linear algebra failure: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl NfError {
    /// Stable machine-readable category name.
    pub fn category(&self) -> &'static str {
        match self {
            NfError::InvalidArgument(_) => "invalid-argument",
            NfError::SingularGeometry(_) => "singular-geometry",
            NfError::DegenerateChannel(_) => "degenerate-channel",
            NfError::Configuration(_) => "configuration",
            NfError::Diagnostic(_) => "diagnostic",
            NfError::Numerical(_) => "numerical",
            NfError::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for NfError {
    fn from(e: std::io::Error) -> Self {
        NfError::Io(e.to_string())
    }
}

impl From<csv::Error> for NfError {
    fn from(e: csv::Error) -> Self {
        NfError::Io(e.to_string())
    }
}

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(NfError::InvalidArgument(msg()))
    }
}
