use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const IO: u8 = 1;
    pub const PARSE: u8 = 2;
    pub const CERTIFICATION: u8 = 3;
    pub const DILATION: u8 = 4;
    pub const VERIFICATION: u8 = 5;
    pub const VN_MARGIN: u8 = 6;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("i/o error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("certification failed: {0}")]
    Certification(String),
    #[error("dilation failed: {0}")]
    Dilation(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => exit::IO,
            CliError::Parse(_) | CliError::Config(_) => exit::PARSE,
            CliError::Certification(_) => exit::CERTIFICATION,
            CliError::Dilation(_) => exit::DILATION,
        }
    }
}
