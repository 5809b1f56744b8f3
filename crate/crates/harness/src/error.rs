use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("usage: {0}")]
    Usage(String),
    /// The experiment ran but its result violates what it checks for.
    #[error("acceptance violation: {0}")]
    Acceptance(String),
    #[error("resource cap: {0}")]
    Resource(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(qucipher::Error),
}

impl HarnessError {
    /// Process exit code: 1 acceptance violation, 2 usage, 3 resource cap.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Acceptance(_) => 1,
            HarnessError::Usage(_) | HarnessError::Io { .. } => 2,
            HarnessError::Resource(_) => 3,
            HarnessError::Core(e) => match e {
                qucipher::Error::Resource(_) => 3,
                qucipher::Error::Domain(_)
                | qucipher::Error::Validation(_)
                | qucipher::Error::Key(_)
                | qucipher::Error::Format(_) => 2,
                _ => 1,
            },
        }
    }
}

impl From<qucipher::Error> for HarnessError {
    fn from(e: qucipher::Error) -> Self {
        HarnessError::Core(e)
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
