use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("no sign change in key rate over [{q_lo}, {q_hi}]: {rate_lo} and {rate_hi}")]
    Bracket { q_lo: f64, q_hi: f64, rate_lo: f64, rate_hi: f64 },
    #[error(transparent)]
    Core(#[from] b92_core::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Bracket { .. } => 3,
            _ => 1,
        }
    }
}
