use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(String),
    /// A numerical guard (certificate, decay, resolution, stability) refused to continue.
    #[error("numerical abort: {0}")]
    Numerical(swigner::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Io(_) => 2,
            RunError::Numerical(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            RunError::Config(_) => "config",
            RunError::Numerical(_) => "certificate",
            RunError::Io(_) => "io",
        }
    }
}

impl From<swigner::Error> for RunError {
    fn from(e: swigner::Error) -> Self {
        use swigner::Error as E;
        match e {
            E::InvalidGrid(_) | E::InvalidParam(_) | E::Parse { .. } | E::UnsupportedSymbol(_) | E::GridMismatch(_) => {
                RunError::Config(e.to_string())
            }
            _ => RunError::Numerical(e),
        }
    }
}
