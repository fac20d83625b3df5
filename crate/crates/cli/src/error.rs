use std::fmt;

/// Failure modes, each with its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or argument range: exit 2.
    Config(String),
    /// Index outside the requested basis: exit 3.
    Index(String),
    /// One or more verification checks failed: exit 1.
    Verify(usize),
    /// Anything else (I/O, numerical failure): exit 1.
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Index(_) => 3,
            CliError::Verify(_) | CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Index(m) => write!(f, "index out of range: {m}"),
            CliError::Verify(n) => write!(f, "{n} verification check(s) failed"),
            CliError::Runtime(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(format!("I/O error: {e}"))
    }
}

impl From<susy_morse::Error> for CliError {
    fn from(e: susy_morse::Error) -> Self {
        use susy_morse::Error as E;
        match e {
            E::Index { .. } | E::EmptyBasis { .. } => CliError::Index(e.to_string()),
            E::Domain(_) | E::DegeneracyCollision { .. } | E::Mixing(_) => CliError::Config(e.to_string()),
            E::Normalization { .. } => CliError::Runtime(e.to_string()),
        }
    }
}
