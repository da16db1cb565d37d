use std::fmt;

/// CLI failure classes; each maps to a stable exit code.
#[derive(Debug)]
pub enum CliError {
    /// Unknown key, bad value, missing input file: exit 2.
    Config(String),
    /// A run aborted on a non-finite value: exit 1.
    Numeric(String),
    /// Reading inputs or writing outputs failed: exit 3.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numeric(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numeric(m) => write!(f, "run aborted: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
        }
    }
}

impl From<laws_vqa::Error> for CliError {
    fn from(e: laws_vqa::Error) -> Self {
        match e {
            laws_vqa::Error::Numeric(m) => CliError::Numeric(m),
            laws_vqa::Error::Io(e) => CliError::Io(e.to_string()),
            laws_vqa::Error::Config(m) | laws_vqa::Error::Usage(m) | laws_vqa::Error::Capability(m) => {
                CliError::Config(m)
            }
            e @ laws_vqa::Error::Parse { .. } => CliError::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
