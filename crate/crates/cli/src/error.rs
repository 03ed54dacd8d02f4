use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error{}: {message}", line.map(|l| format!(" on line {l}")).unwrap_or_default())]
    Config { line: Option<usize>, message: String },

    #[error("capacity error: {0}")]
    Capacity(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Core(#[from] fragqsp::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn config(line: Option<usize>, message: impl Into<String>) -> Self {
        CliError::Config { line, message: message.into() }
    }

    /// 2 config, 3 capacity, 4 verification; 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        use fragqsp::Error as E;
        match self {
            CliError::Config { .. } => 2,
            CliError::Capacity(_) => 3,
            CliError::Verification(_) => 4,
            CliError::Core(e) => match e {
                E::Capacity { .. } | E::TooLargeForDense { .. } => 3,
                E::InvalidSymbol(_)
                | E::InvalidLength(_)
                | E::OddChain(_)
                | E::SignalCondition { .. }
                | E::ZeroStaggeredAmplitude
                | E::SignalOutOfRange(_)
                | E::OutOfRange { .. }
                | E::Empty(_) => 2,
                E::ChebyshevNotConverged { .. } | E::NormDrift { .. } | E::Eigensolver(_) | E::QspCondition { .. } => 4,
                _ => 1,
            },
            CliError::Io(_) => 1,
        }
    }
}
